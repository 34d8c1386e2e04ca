// Command-line experiment harness: reproducible runs keyed by one master
// seed, atomic file outputs carrying a config hash, and a manifest per run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "secrecy/info.hpp"
#include "secrecy/polar.hpp"
#include "secrecy/typicality.hpp"
#include "secrecy/uniform_compression.hpp"
#include "secrecy/wiretap.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using secrecy::Pmf;

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<std::string> split_words(const std::string& s) {
    std::istringstream iss(s);
    std::vector<std::string> out;
    std::string w;
    while (iss >> w) out.push_back(w);
    return out;
}

Pmf parse_source(const std::string& spec) {
    auto w = split_words(spec);
    if (w.empty()) throw std::invalid_argument("empty source spec");
    if (w[0] == "bern" && w.size() == 2) return Pmf::bernoulli(std::stod(w[1]));
    if (w[0] == "uniform" && w.size() == 2) return Pmf::uniform(std::stoul(w[1]));
    if (w[0] == "pmf" && w.size() >= 2) {
        std::vector<double> p;
        for (std::size_t i = 1; i < w.size(); ++i) p.push_back(std::stod(w[i]));
        return Pmf(std::move(p));
    }
    throw std::invalid_argument("source spec must be 'bern p', 'uniform k' or 'pmf ...'");
}

secrecy::WiretapChannel parse_channel(const std::string& spec) {
    auto w = split_words(spec);
    if (w.size() == 3 && w[0] == "bsc")
        return secrecy::WiretapChannel::bsc_pair(std::stod(w[1]), std::stod(w[2]));
    if (w.size() == 3 && w[0] == "bec")
        return secrecy::WiretapChannel::bec_pair(std::stod(w[1]), std::stod(w[2]));
    if (w.size() == 2 && w[0] == "kernel") {
        std::ifstream f(w[1]);
        if (!f) throw std::invalid_argument("cannot open kernel file " + w[1]);
        return secrecy::WiretapChannel::from_kernel_file(f);
    }
    throw std::invalid_argument(
        "channel spec must be 'bsc p1 p2', 'bec e1 e2' or 'kernel <file>'");
}

// canonical hash over the resolved option values of the run
class RunContext {
public:
    void record(const std::string& key, const std::string& value) {
        options_[key] = value;
    }
    void record(const std::string& key, double v) { options_[key] = fmt12(v); }
    void record(const std::string& key, std::uint64_t v) {
        options_[key] = std::to_string(v);
    }

    std::string config_hash() const {
        std::string canon;
        for (const auto& [k, v] : options_) canon += k + "=" + v + "\n";
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(secrecy::fnv1a64(canon)));
        return buf;
    }

    // atomic write: temp file then rename
    void write_file(const std::string& path, const std::string& data) {
        std::string tmp = path + ".tmp";
        {
            std::ofstream f(tmp, std::ios::binary);
            if (!f) throw std::runtime_error("cannot write " + tmp);
            f << data;
        }
        std::filesystem::rename(tmp, path);
        outputs_.push_back(path);
    }

    void emit(const std::string& out_path, const std::string& data) {
        if (out_path.empty()) {
            std::cout << data;
            if (!data.empty() && data.back() != '\n') std::cout << "\n";
        } else {
            write_file(out_path, data);
            write_manifest(out_path);
        }
    }

    void write_manifest(const std::string& out_path) {
        nlohmann::ordered_json m;
        m["config_hash"] = config_hash();
        m["version"] = kVersion;
        auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start_)
                           .count();
        m["timings_ms"] = {{"total", elapsed}};
        m["outputs"] = outputs_;
        std::string path = out_path + ".manifest.json";
        std::string tmp = path + ".tmp";
        {
            std::ofstream f(tmp, std::ios::binary);
            f << m.dump(2) << "\n";
        }
        std::filesystem::rename(tmp, path);
    }

private:
    std::map<std::string, std::string> options_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct GlobalOpts {
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    bool use_mc = false;
    std::uint64_t trials = 100000;
};

void cmd_entropy(const std::vector<std::string>& specs) {
    std::printf("%-36s %16s %16s %16s\n", "distribution", "H", "H2", "Hinf");
    for (const std::string& spec : specs) {
        auto w = split_words(spec);
        if (!w.empty() && w[0] == "example-dist") {
            unsigned n = 0;
            double alpha = 0.0, rp = 0.0;
            for (std::size_t i = 1; i < w.size(); ++i) {
                auto eq = w[i].find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("expected k=v in example-dist spec");
                std::string k = w[i].substr(0, eq), v = w[i].substr(eq + 1);
                if (k == "n")
                    n = std::stoul(v);
                else if (k == "alpha")
                    alpha = std::stod(v);
                else if (k == "rp")
                    rp = std::stod(v);
                else
                    throw std::invalid_argument("unknown example-dist key " + k);
            }
            if (n == 0) throw std::invalid_argument("example-dist needs n=...");
            double h2_rate = secrecy::example_distribution_h2_rate(n, alpha, rp);
            if (n * rp <= 20.0) {
                Pmf p = secrecy::example_distribution(n, alpha, rp);
                std::printf("%-36s %16s %16s %16s\n", spec.c_str(),
                            fmt12(secrecy::shannon_entropy(p)).c_str(),
                            fmt12(secrecy::renyi2_entropy(p)).c_str(),
                            fmt12(secrecy::min_entropy(p)).c_str());
            }
            std::printf("%-36s (1/n)H2 = %s  [alpha*rp = %s, 2*alpha*rp = %s]\n",
                        spec.c_str(), fmt12(h2_rate).c_str(), fmt12(alpha * rp).c_str(),
                        fmt12(2.0 * alpha * rp).c_str());
            continue;
        }
        Pmf p = parse_source(spec);
        std::printf("%-36s %16s %16s %16s\n", spec.c_str(),
                    fmt12(secrecy::shannon_entropy(p)).c_str(),
                    fmt12(secrecy::renyi2_entropy(p)).c_str(),
                    fmt12(secrecy::min_entropy(p)).c_str());
    }
}

int run(int argc, char** argv) {
    CLI::App app{"finite-alphabet secrecy-coding toolkit"};
    app.require_subcommand(1);
    app.set_config("--config");

    GlobalOpts g;
    app.add_option("--seed", g.seed, "master seed (required for randomized commands)")
        ->each([&](const std::string&) { g.seed_set = true; });
    app.add_option("--out", g.out, "output file (stdout when omitted)");
    app.add_flag("--mc", g.use_mc, "Monte Carlo evaluation");
    bool exact_flag = false;
    app.add_flag("--exact", exact_flag, "exact evaluation (default)");
    app.add_option("--trials", g.trials, "Monte Carlo trials");

    auto need_seed = [&g]() {
        if (!g.seed_set)
            throw CLI::ValidationError("--seed", "a master seed is required");
    };

    // entropy
    std::vector<std::string> entropy_specs;
    CLI::App* c_entropy =
        app.add_subcommand("entropy", "print H, H2, Hinf for pmf specs");
    c_entropy
        ->add_option("spec", entropy_specs,
                     "e.g. 'bern 0.5', 'uniform 8', "
                     "'example-dist n=100 alpha=0.25 rp=1'")
        ->required();

    // typical
    std::string t_source = "bern 0.3";
    unsigned t_n = 10;
    double t_eps = 0.3;
    std::string t_save;
    CLI::App* c_typical = app.add_subcommand("typical", "build a typical-set index");
    c_typical->add_option("--source", t_source, "source spec");
    c_typical->add_option("--n", t_n, "blocklength");
    c_typical->add_option("--eps", t_eps, "typicality parameter");
    c_typical->add_option("--save", t_save, "write the index cache file");

    // ucc-binning
    std::string b_source = "bern 0.3";
    unsigned b_n = 10, b_d = 6;
    double b_rate_offset = 0.25, b_eps1 = 0.3;
    std::uint64_t b_bin_seed = 1;
    CLI::App* c_binning =
        app.add_subcommand("ucc-binning", "random-binning uniform compression code");
    c_binning->add_option("--source", b_source, "source spec");
    c_binning->add_option("--n", b_n, "blocklength");
    c_binning->add_option("--d", b_d, "seed length d_n in bits");
    c_binning->add_option("--rate-offset", b_rate_offset, "R = H(X) + offset");
    c_binning->add_option("--eps1", b_eps1, "decoder typicality parameter");
    c_binning->add_option("--bin-seed", b_bin_seed, "codebook randomization seed");

    // ucc-extract
    std::string x_source = "bern 0.3";
    unsigned x_n = 10;
    double x_eps0 = 0.3;
    CLI::App* c_extract = app.add_subcommand(
        "ucc-extract", "typical-sequence code with an invertible extractor");
    c_extract->add_option("--source", x_source, "source spec");
    c_extract->add_option("--n", x_n, "blocklength");
    c_extract->add_option("--eps0", x_eps0, "typicality parameter");

    // polar-construct
    std::string p_p1 = "0.11";
    unsigned p_n = 1024;
    double p_beta = 0.25;
    std::string p_method = "monte-carlo";
    std::uint64_t p_samples = 100000;
    std::string p_cache_dir;
    CLI::App* c_pconstruct =
        app.add_subcommand("polar-construct", "build or load a polar construction");
    c_pconstruct->add_option("--p1", p_p1, "P(X=1) as a decimal string");
    c_pconstruct->add_option("--N", p_n, "blocklength (power of two)");
    c_pconstruct->add_option("--beta", p_beta, "polarization exponent in ]0, 1/2[");
    c_pconstruct->add_option("--method", p_method, "exact or monte-carlo");
    c_pconstruct->add_option("--samples", p_samples, "construction samples");
    c_pconstruct->add_option("--cache-dir", p_cache_dir, "construction cache directory");

    // polar-run
    std::string r_p1 = "0.11";
    double r_beta = 0.25;
    std::string r_method = "monte-carlo";
    std::uint64_t r_samples = 100000;
    std::vector<unsigned> r_n_list = {1024};
    std::uint64_t r_trials = 1000;
    std::string r_cache_dir;
    CLI::App* c_prun = app.add_subcommand(
        "polar-run", "roundtrip simulation; several N values emit a scaling CSV");
    c_prun->add_option("--p1", r_p1, "P(X=1) as a decimal string");
    c_prun->add_option("--beta", r_beta, "polarization exponent");
    c_prun->add_option("--method", r_method, "exact or monte-carlo");
    c_prun->add_option("--samples", r_samples, "construction samples");
    c_prun->add_option("--n-list", r_n_list, "blocklengths");
    c_prun->add_option("--run-trials", r_trials, "roundtrip trials per N");
    c_prun->add_option("--cache-dir", r_cache_dir, "construction cache directory");

    // wiretap-region
    std::string w_channel = "bsc 0.05 0.2";
    double w_hc = 0.3, w_hp = 0.4;
    unsigned w_grid = 64;
    CLI::App* c_region = app.add_subcommand("wiretap-region", "rate-region feasibility");
    c_region->add_option("--channel", w_channel, "channel spec");
    c_region->add_option("--hc", w_hc, "confidential entropy H(V_c) in bits");
    c_region->add_option("--hp", w_hp, "public entropy H(V_p) in bits");
    c_region->add_option("--grid", w_grid, "conditionals per simplex axis");

    // wiretap-sim
    std::string s_arch = "A", s_channel = "bsc 0.05 0.2";
    std::string s_source_c = "bern 0.3", s_source_p = "bern 0.3";
    unsigned s_n = 6;
    double s_eps_source = 0.4, s_eps_decoder = 0.3, s_ucc_rate = 1.0;
    unsigned s_ucc_d = 4;
    std::uint64_t s_cb_seed = 1;
    CLI::App* c_sim = app.add_subcommand("wiretap-sim", "end-to-end multiplexing run");
    c_sim->add_option("--arch", s_arch, "A or B");
    c_sim->add_option("--channel", s_channel, "channel spec");
    c_sim->add_option("--source-c", s_source_c, "confidential source spec");
    c_sim->add_option("--source-p", s_source_p, "public source spec");
    c_sim->add_option("--n", s_n, "blocklength");
    c_sim->add_option("--eps-source", s_eps_source, "source-code typicality");
    c_sim->add_option("--eps-decoder", s_eps_decoder, "channel-decoder typicality");
    c_sim->add_option("--ucc-rate", s_ucc_rate, "arch B compressor rate");
    c_sim->add_option("--ucc-d", s_ucc_d, "arch B shared seed bits");
    c_sim->add_option("--codebook-seed", s_cb_seed, "wiretap codebook seed");

    // seed-sweep
    std::string sw_source = "bern 0.3";
    double sw_c = 1.0, sw_eps1 = 0.5, sw_rate_offset = 0.2;
    unsigned sw_bin_seeds = 10;
    CLI::App* c_sweep = app.add_subcommand(
        "seed-sweep", "exact pe/ue for d_n = ceil(c n^e) over n in {8,12,16}");
    c_sweep->add_option("--source", sw_source, "source spec");
    c_sweep->add_option("--c", sw_c, "seed-length coefficient");
    c_sweep->add_option("--eps1", sw_eps1, "decoder typicality parameter");
    c_sweep->add_option("--rate-offset", sw_rate_offset, "R = H(X) + offset");
    c_sweep->add_option("--bin-seeds", sw_bin_seeds, "binning seeds averaged per cell");

    // global flags may appear after the subcommand name
    for (CLI::App* sc : app.get_subcommands([](const CLI::App*) { return true; }))
        sc->fallthrough();

    CLI11_PARSE(app, argc, argv);

    RunContext ctx;

    if (*c_entropy) {
        cmd_entropy(entropy_specs);
        return 0;
    }

    if (*c_typical) {
        Pmf p = parse_source(t_source);
        secrecy::TypicalSetIndex idx = secrecy::build_typical_index(p, t_n, t_eps);
        ctx.record("cmd", std::string("typical"));
        ctx.record("source", t_source);
        ctx.record("n", static_cast<std::uint64_t>(t_n));
        ctx.record("eps", t_eps);
        nlohmann::ordered_json j;
        j["config_hash"] = ctx.config_hash();
        j["n"] = t_n;
        j["eps"] = t_eps;
        j["count"] = idx.count();
        j["rate"] = idx.rate();
        double h = secrecy::shannon_entropy(p);
        j["rate_upper"] = (1.0 + t_eps) * h;
        j["atypicality_exact"] = secrecy::atypicality_probability_exact(p, t_n, t_eps);
        j["atypicality_bound"] = secrecy::atypicality_probability_bound(p, t_n, t_eps);
        if (!t_save.empty()) {
            std::ostringstream buf;
            idx.save(buf);
            ctx.write_file(t_save, buf.str());
            j["cache"] = t_save;
        }
        ctx.emit(g.out, j.dump(2));
        return 0;
    }

    if (*c_binning) {
        need_seed();
        Pmf p = parse_source(b_source);
        double h = secrecy::shannon_entropy(p);
        secrecy::UcParams params = secrecy::make_uc_params(b_n, h + b_rate_offset, b_d);
        secrecy::BinningCode code = secrecy::rb_build(p, params, b_eps1, b_bin_seed);
        secrecy::TypicalSetIndex index = secrecy::build_typical_index(p, b_n, b_eps1);
        ctx.record("cmd", std::string("ucc-binning"));
        ctx.record("source", b_source);
        ctx.record("n", static_cast<std::uint64_t>(b_n));
        ctx.record("d", static_cast<std::uint64_t>(b_d));
        ctx.record("rate_offset", b_rate_offset);
        ctx.record("eps1", b_eps1);
        ctx.record("bin_seed", b_bin_seed);
        ctx.record("mode", std::string(g.use_mc ? "mc" : "exact"));
        if (g.use_mc) {
            ctx.record("trials", g.trials);
            ctx.record("seed", g.seed);
        }
        secrecy::UcReport rep = g.use_mc
                                    ? secrecy::evaluate_mc(code, index, g.trials, g.seed)
                                    : secrecy::evaluate_exact(code, index);
        auto j = nlohmann::ordered_json::parse(secrecy::uc_report_json(rep));
        j["config_hash"] = ctx.config_hash();
        ctx.emit(g.out, j.dump(2));
        return 0;
    }

    if (*c_extract) {
        Pmf p = parse_source(x_source);
        secrecy::TypicalSetIndex index = secrecy::build_typical_index(p, x_n, x_eps0);
        unsigned w = 1;
        while ((1ULL << w) < index.count()) ++w;
        secrecy::ExtractorPipelineCode pipe(
            index, std::make_shared<secrecy::AffineFieldExtractor>(w));
        ctx.record("cmd", std::string("ucc-extract"));
        ctx.record("source", x_source);
        ctx.record("n", static_cast<std::uint64_t>(x_n));
        ctx.record("eps0", x_eps0);
        auto j =
            nlohmann::ordered_json::parse(secrecy::uc_report_json(pipe.evaluate_exact()));
        j["config_hash"] = ctx.config_hash();
        j["extractor"] = pipe.extractor().name();
        j["width"] = pipe.width();
        ctx.emit(g.out, j.dump(2));
        return 0;
    }

    auto cached_construction = [&](const std::string& p1, unsigned n_bits, double beta,
                                   const std::string& method, std::uint64_t samples,
                                   std::uint64_t seed,
                                   const std::string& dir) -> secrecy::PolarConstruction {
        std::string path;
        if (!dir.empty()) {
            std::filesystem::create_directories(dir);
            std::ostringstream name;
            name << "polar-" << p1 << "-" << n_bits << "-" << fmt12(beta) << "-" << method
                 << "-" << samples << "-" << seed << ".bin";
            path = (std::filesystem::path(dir) / name.str()).string();
            std::ifstream f(path, std::ios::binary);
            if (f) {
                auto c =
                    secrecy::polar_cache_load(f, n_bits, beta, p1, method, samples, seed);
                if (c) return *c;
            }
        }
        auto [num, den] = secrecy::decimal_to_fraction(p1);
        Pmf p = Pmf::bernoulli(static_cast<double>(num) / static_cast<double>(den));
        secrecy::PolarConstruction c =
            secrecy::build_polar_construction(p, n_bits, beta, method, samples, seed);
        if (!path.empty()) {
            std::ostringstream buf;
            secrecy::polar_cache_save(buf, c, p1);
            std::string tmp = path + ".tmp";
            std::ofstream f(tmp, std::ios::binary);
            f << buf.str();
            f.close();
            std::filesystem::rename(tmp, path);
        }
        return c;
    };

    if (*c_pconstruct) {
        bool exact_method = p_method == "exact";
        if (!exact_method) need_seed();
        secrecy::PolarConstruction c =
            cached_construction(p_p1, p_n, p_beta, p_method, exact_method ? 0 : p_samples,
                                exact_method ? 0 : g.seed, p_cache_dir);
        ctx.record("cmd", std::string("polar-construct"));
        ctx.record("p1", p_p1);
        ctx.record("N", static_cast<std::uint64_t>(p_n));
        ctx.record("beta", p_beta);
        ctx.record("method", p_method);
        ctx.record("samples", p_samples);
        ctx.record("seed", g.seed);
        nlohmann::ordered_json j;
        j["config_hash"] = ctx.config_hash();
        j["N"] = p_n;
        j["beta"] = p_beta;
        j["delta_N"] = c.delta_n;
        j["h_set_size"] = c.sets.h_set.size();
        j["v_set_size"] = c.sets.v_set.size();
        j["seed_len"] = c.sets.h_set.size() - c.sets.v_set.size();
        j["rate"] = static_cast<double>(c.sets.h_set.size()) / p_n;
        ctx.emit(g.out, j.dump(2));
        return 0;
    }

    if (*c_prun) {
        need_seed();
        ctx.record("cmd", std::string("polar-run"));
        ctx.record("p1", r_p1);
        ctx.record("beta", r_beta);
        ctx.record("method", r_method);
        ctx.record("samples", r_samples);
        ctx.record("trials", r_trials);
        ctx.record("seed", g.seed);
        {
            std::string ns;
            for (unsigned n : r_n_list) ns += std::to_string(n) + " ";
            ctx.record("n_list", ns);
        }
        std::ostringstream csv;
        csv << "# config_hash=" << ctx.config_hash() << "\n";
        csv << "N,h_frac,v_frac,seed_frac,pe\n";
        for (unsigned n_bits : r_n_list) {
            secrecy::PolarConstruction c = cached_construction(
                r_p1, n_bits, r_beta, r_method, r_method == "exact" ? 0 : r_samples,
                r_method == "exact" ? 0 : g.seed, r_cache_dir);
            secrecy::PolarUcCode code(c);
            double pe =
                secrecy::polar_roundtrip_pe(code, r_trials, secrecy::mix64(g.seed ^ n_bits));
            double nn = static_cast<double>(n_bits);
            csv << n_bits << "," << fmt12(c.sets.h_set.size() / nn) << ","
                << fmt12(c.sets.v_set.size() / nn) << ","
                << fmt12((c.sets.h_set.size() - c.sets.v_set.size()) / nn) << ","
                << fmt12(pe) << "\n";
        }
        ctx.emit(g.out, csv.str());
        return 0;
    }

    if (*c_region) {
        secrecy::WiretapChannel ch = parse_channel(w_channel);
        secrecy::FeasibilityResult r = secrecy::region_feasible(w_hc, w_hp, ch, w_grid);
        ctx.record("cmd", std::string("wiretap-region"));
        ctx.record("channel", w_channel);
        ctx.record("hc", w_hc);
        ctx.record("hp", w_hp);
        ctx.record("grid", static_cast<std::uint64_t>(w_grid));
        nlohmann::ordered_json j;
        j["config_hash"] = ctx.config_hash();
        j["feasible"] = r.feasible;
        j["slacks"] = r.slacks;
        if (r.feasible) {
            j["q_weights"] = r.q_weights;
            nlohmann::ordered_json conds = nlohmann::ordered_json::array();
            for (const Pmf& p : r.x_given_q) conds.push_back(p.probs());
            j["x_given_q"] = conds;
        }
        ctx.emit(g.out, j.dump(2));
        return 0;
    }

    if (*c_sim) {
        need_seed();
        if (s_arch != "A" && s_arch != "B")
            throw CLI::ValidationError("--arch", "must be A or B");
        secrecy::MuxConfig cfg;
        cfg.arch =
            s_arch == "B" ? secrecy::MuxArchitecture::B : secrecy::MuxArchitecture::A;
        cfg.source_c = {parse_source(s_source_c), s_source_c};
        cfg.source_p = {parse_source(s_source_p), s_source_p};
        cfg.channel = parse_channel(s_channel);
        cfg.n = s_n;
        cfg.eps_source = s_eps_source;
        cfg.eps_decoder = s_eps_decoder;
        cfg.input_dist = Pmf::uniform(cfg.channel.x_size());
        cfg.ucc_rate = s_ucc_rate;
        cfg.ucc_seed_len = s_ucc_d;
        cfg.codebook_seed = s_cb_seed;
        ctx.record("cmd", std::string("wiretap-sim"));
        ctx.record("arch", s_arch);
        ctx.record("channel", s_channel);
        ctx.record("source_c", s_source_c);
        ctx.record("source_p", s_source_p);
        ctx.record("n", static_cast<std::uint64_t>(s_n));
        ctx.record("eps_source", s_eps_source);
        ctx.record("eps_decoder", s_eps_decoder);
        ctx.record("trials", g.trials);
        ctx.record("seed", g.seed);

        double hc = secrecy::shannon_entropy(cfg.source_c.pmf);
        double hp = secrecy::shannon_entropy(cfg.source_p.pmf);
        secrecy::FeasibilityResult region = secrecy::region_feasible(hc, hp, cfg.channel, 64);

        secrecy::MuxReport rep = cfg.arch == secrecy::MuxArchitecture::B
                                     ? secrecy::mux_b_run(cfg, g.trials, g.seed)
                                     : secrecy::mux_a_run(cfg, g.trials, g.seed);
        nlohmann::ordered_json j;
        j["config_hash"] = ctx.config_hash();
        j["region"] = {{"hc", hc},
                       {"hp", hp},
                       {"feasible", region.feasible},
                       {"slacks", region.slacks}};
        j["sim"] = nlohmann::ordered_json::parse(secrecy::mux_report_json(rep));
        ctx.emit(g.out, j.dump(2));
        return 0;
    }

    if (*c_sweep) {
        need_seed();
        Pmf p = parse_source(sw_source);
        double h = secrecy::shannon_entropy(p);
        ctx.record("cmd", std::string("seed-sweep"));
        ctx.record("source", sw_source);
        ctx.record("c", sw_c);
        ctx.record("eps1", sw_eps1);
        ctx.record("rate_offset", sw_rate_offset);
        ctx.record("bin_seeds", static_cast<std::uint64_t>(sw_bin_seeds));
        ctx.record("seed", g.seed);
        std::ostringstream csv;
        csv << "# config_hash=" << ctx.config_hash() << "\n";
        csv << "n,d_n,exponent,pe,ue\n";
        for (unsigned n : {8u, 12u, 16u}) {
            secrecy::TypicalSetIndex index = secrecy::build_typical_index(p, n, sw_eps1);
            for (double e : {0.0, 0.25, 0.5, 0.75}) {
                auto d = static_cast<unsigned>(
                    std::ceil(sw_c * std::pow(static_cast<double>(n), e)));
                secrecy::UcParams params = secrecy::make_uc_params(n, h + sw_rate_offset, d);
                double pe = 0.0, ue = 0.0;
                for (unsigned s = 0; s < sw_bin_seeds; ++s) {
                    std::uint64_t bin_seed =
                        secrecy::derive_stream(g.seed, "sweep-" + std::to_string(n) + "-" +
                                                           fmt12(e) + "-" + std::to_string(s))
                            .next();
                    secrecy::BinningCode code = secrecy::rb_build(p, params, sw_eps1, bin_seed);
                    secrecy::UcReport r = secrecy::evaluate_exact(code, index);
                    pe += r.pe / sw_bin_seeds;
                    ue += r.ue / sw_bin_seeds;
                }
                csv << n << "," << d << "," << fmt12(e) << "," << fmt12(pe) << ","
                    << fmt12(ue) << "\n";
            }
        }
        ctx.emit(g.out, csv.str());
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::length_error& e) {
        std::cerr << "scale guard: " << e.what() << "\n";
        return 3;
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return e.get_exit_code() == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
