// setcomp: train models, encode/decode set files, generate corpora, benchmark.
//
// Exit codes: 0 ok, 1 usage, 2 data or format error, 3 model contradiction.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "setcomp/setcomp.hpp"

namespace {

using namespace setcomp;

enum Exit { ok = 0, usage = 1, data_error = 2, contradiction = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::optional<CounterModel> maybe_load(const std::string& path)
{
    if (path.empty())
        return std::nullopt;
    return load_model(path);
}

CodecId codec_arg(const std::string& name)
{
    if (auto id = parse_codec(name))
        return *id;
    std::string known;
    for (auto n : kCodecNames)
        known += (known.empty() ? "" : ", ") + std::string(n);
    throw UsageError("unknown codec '" + name + "' (known: " + known + ")");
}

void emit_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw Error("cannot write " + path);
}

struct TrainArgs {
    std::string in, out;
    bool permute = false;
};

int cmd_train(const TrainArgs& a)
{
    const Dataset d = read_sets(a.in);
    if (d.sets.empty())
        std::cerr << "warning: " << a.in << " holds no sets; all counters are zero\n";
    const CounterModel m = train(d.sets, d.universe, a.permute);
    save_model(m, a.out);
    std::cerr << "trained on " << d.sets.size() << " sets, |U|=" << d.universe << ", C_root=" << m.root_count()
              << (a.permute ? ", permuted" : "") << "\n";
    return ok;
}

struct CodeArgs {
    std::string codec = "rss-hg";
    std::string model;
    std::string in, out;
    bool permute = false;
    bool strict = false;
    std::optional<double> p;
};

int cmd_encode(const CodeArgs& a)
{
    const CodecId id = codec_arg(a.codec);
    const auto model = maybe_load(a.model);
    if ((uses_counters(id) || a.permute) && !model)
        throw UsageError(std::string(codec_name(id)) + (a.permute ? " with --permute" : "") + " needs -m <model>");
    if (id == CodecId::yesno && !model && !a.p)
        throw UsageError("yesno needs -m <model> or --p <probability>");
    CodecOptions opt;
    opt.permuted = a.permute;
    opt.robust = !a.strict;
    opt.p_global = a.p;
    const Dataset d = read_sets(a.in);
    const SetCodec codec(id, opt, model ? &*model : nullptr);
    wire::write_file(a.out, encode_dataset(codec, d).to_bytes());
    return ok;
}

int cmd_decode(const CodeArgs& a)
{
    const auto model = maybe_load(a.model);
    const Container c = Container::from_bytes(wire::read_file(a.in));
    const Dataset d = decode_container(c, model ? &*model : nullptr);
    std::ostringstream text;
    format_sets(text, d);
    emit_text(a.out, text.str());
    return ok;
}

struct BenchArgs {
    std::string codecs = "gap,gap-wor,interp,tournament,rss-flat,rss-hg";
    std::string in, model, csv;
    bool self_train = false;
    bool permute = false;
    bool strict = false;
    bool ideal_only = false;
    bool actual = false;
    std::optional<double> p;
    unsigned threads = 1;
};

int cmd_bench(const BenchArgs& a)
{
    BenchOptions opt;
    std::stringstream list(a.codecs);
    for (std::string name; std::getline(list, name, ',');)
        if (!name.empty())
            opt.codecs.push_back(codec_arg(name));
    if (opt.codecs.empty())
        throw UsageError("no codecs given");
    opt.permuted = a.permute;
    opt.robust = !a.strict;
    opt.yesno_p = a.p;
    opt.ideal_only = a.ideal_only;
    opt.per_element_actual = a.actual;
    opt.threads = a.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : a.threads;
    if (a.actual && a.ideal_only)
        throw UsageError("--actual needs payloads; drop --ideal-only");

    const Dataset d = read_sets(a.in);
    std::optional<CounterModel> model;
    if (a.self_train) {
        model = train(d.sets, d.universe, a.permute);
    } else {
        model = maybe_load(a.model);
    }
    const bool needs_model = a.permute || std::any_of(opt.codecs.begin(), opt.codecs.end(), [&](CodecId id) {
                                 return uses_counters(id) || (id == CodecId::yesno && !a.p);
                             });
    if (needs_model && !model)
        throw UsageError("requested codecs need -m <model> or --self-train");

    std::cerr << "statistics: "
              << (a.self_train ? "self-trained on the benchmark data" : model ? "held-out model " + a.model : "none")
              << "\n";
    const auto rows = run_bench(d, opt, model ? &*model : nullptr);
    std::ostringstream out;
    write_csv_header(out);
    for (const auto& r : rows)
        write_csv_row(out, r);
    emit_text(a.csv, out.str());
    return ok;
}

struct GenArgs {
    std::string kind;
    std::string out;
    std::string input;
    unsigned group = 1;
    std::uint64_t universe = 10000;
    std::uint64_t k = 100;
    std::uint64_t support_size = 100;
    double density = 0.5;
    double exponent = 1.2;
    double mean_size = 100;
    std::size_t count = 100;
    std::uint64_t seed = 1;
    bool no_relabel = false;
};

int cmd_gen(const GenArgs& a)
{
    Dataset d;
    if (a.kind == "bits") {
        if (a.input.empty())
            throw UsageError("gen bits needs --input <file>");
        const auto bytes = wire::read_file(a.input);
        d = gen_bit_sets(bytes, a.group);
    } else if (a.kind == "multiples") {
        d = gen_multiples(a.universe, a.k, a.density, a.count, a.seed);
    } else if (a.kind == "support" || a.kind == "prefix") {
        d = gen_support(a.universe, a.support_size, a.kind == "support" ? SupportMode::random : SupportMode::prefix,
                        a.density, a.count, a.seed);
    } else if (a.kind == "zipf") {
        d = gen_zipf(a.universe, a.exponent, a.mean_size, a.count, a.seed, !a.no_relabel);
    } else {
        throw UsageError("unknown generator kind '" + a.kind + "'");
    }
    std::ostringstream text;
    format_sets(text, d);
    emit_text(a.out, text.str());
    return ok;
}

int guarded(const std::function<int()>& body)
{
    try {
        return body();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const ModelContradiction& e) {
        std::cerr << "model contradiction: " << e.what() << "\n";
        return contradiction;
    } catch (const ModelMismatch& e) {
        std::cerr << "model mismatch: " << e.what() << "\n";
        return data_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return data_error;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"set compression toolkit"};
    app.require_subcommand(1);

    TrainArgs ta;
    auto* train_cmd = app.add_subcommand("train", "train a counter model from a sets file");
    train_cmd->add_option("-i,--input", ta.in, "sets file")->required();
    train_cmd->add_option("-o,--output", ta.out, "model file")->required();
    train_cmd->add_flag("--permute", ta.permute, "train in probability-order permuted space");

    CodeArgs ea;
    auto* enc = app.add_subcommand("encode", "compress a sets file");
    enc->add_option("--codec", ea.codec, "codec name")->required();
    enc->add_option("-m,--model", ea.model, "model file");
    enc->add_option("-i,--input", ea.in, "sets file")->required();
    enc->add_option("-o,--output", ea.out, "compressed file")->required();
    enc->add_flag("--permute", ea.permute, "code in permuted universe (needs a model)");
    enc->add_flag("--robust,!--strict", [&](std::int64_t v) { ea.strict = v < 0; },
                  "smoothed statistics (default) or trust q in {0,1}");
    enc->add_option("--p", ea.p, "yesno: global probability; others: binomial set-size prior")
        ->check(CLI::Range(0.0, 1.0));

    CodeArgs da;
    auto* dec = app.add_subcommand("decode", "decompress to a sets file");
    dec->add_option("-m,--model", da.model, "model file");
    dec->add_option("-i,--input", da.in, "compressed file")->required();
    dec->add_option("-o,--output", da.out, "sets file (default stdout)");

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "bits per element of each codec over a dataset, as CSV");
    bench->add_option("--codecs", ba.codecs, "comma-separated codec names");
    bench->add_option("-i,--input", ba.in, "sets file")->required();
    auto* model_opt = bench->add_option("-m,--model", ba.model, "held-out model file");
    bench->add_flag("--self-train", ba.self_train, "train statistics on the benchmark data itself")
        ->excludes(model_opt);
    bench->add_flag("--permute", ba.permute, "code in permuted universe");
    bench->add_flag("--robust,!--strict", [&](std::int64_t v) { ba.strict = v < 0; },
                    "smoothed statistics (default) or trust q in {0,1}");
    bench->add_option("--p", ba.p, "global probability for yesno")->check(CLI::Range(0.0, 1.0));
    bench->add_option("--csv", ba.csv, "output CSV (default stdout)");
    bench->add_flag("--ideal-only", ba.ideal_only, "skip payload construction");
    bench->add_flag("--actual", ba.actual, "bits_per_element from coded payload size");
    bench->add_option("--threads", ba.threads, "worker threads (0 = all cores)");

    GenArgs ga;
    auto* gen = app.add_subcommand("gen", "generate a sets file");
    gen->add_option("--kind", ga.kind, "bits | multiples | support | prefix | zipf")
        ->required()
        ->check(CLI::IsMember({"bits", "multiples", "support", "prefix", "zipf"}));
    gen->add_option("-o,--output", ga.out, "sets file (default stdout)");
    gen->add_option("--input", ga.input, "bits: input file");
    gen->add_option("--group", ga.group, "bits: bytes per set")->check(CLI::Range(1u, 8u));
    gen->add_option("--universe", ga.universe, "universe size");
    gen->add_option("--k", ga.k, "multiples: step");
    gen->add_option("--support-size", ga.support_size, "support/prefix: support size");
    gen->add_option("--density", ga.density, "Bernoulli inclusion probability");
    gen->add_option("--exponent", ga.exponent, "zipf: exponent s");
    gen->add_option("--mean-size", ga.mean_size, "zipf: expected set size");
    gen->add_option("--count", ga.count, "number of sets");
    gen->add_option("--seed", ga.seed, "random seed");
    gen->add_flag("--no-relabel", ga.no_relabel, "zipf: keep frequency aligned with element order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    if (*train_cmd)
        return guarded([&] { return cmd_train(ta); });
    if (*enc)
        return guarded([&] { return cmd_encode(ea); });
    if (*dec)
        return guarded([&] { return cmd_decode(da); });
    if (*bench)
        return guarded([&] { return cmd_bench(ba); });
    return guarded([&] { return cmd_gen(ga); });
}
