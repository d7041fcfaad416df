#include "spdt/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "spdt/analysis.hpp"
#include "spdt/diffusion.hpp"
#include "spdt/errors.hpp"
#include "spdt/extraction.hpp"
#include "spdt/fitting.hpp"
#include "spdt/generator.hpp"
#include "spdt/io.hpp"
#include "spdt/network.hpp"

namespace spdt {

const char *kVersion = "spdt 1.0.0";

namespace {

namespace fs = std::filesystem;

// Every run records its resolved configuration next to its primary output:
// <dir>/run.log for directory outputs, <file>.log otherwise.
void write_run_log(const std::string &target, bool is_dir, const std::string &content)
{
    const std::string path = is_dir ? target + "/run.log" : target + ".log";
    write_text_file(path, content);
}

std::string join_args(const std::vector<std::string> &args)
{
    std::string all;
    for (const auto &a : args) {
        if (!all.empty())
            all += ' ';
        all += a;
    }
    return all;
}

DiseaseParams load_disease(const std::string &path)
{
    const KvFile kv = KvFile::load(path);
    DiseaseParams p;
    p.particle_rate = kv.get_double("g", p.particle_rate);
    p.pulmonary_rate = kv.get_double("p", p.pulmonary_rate);
    p.volume = kv.get_double("V", p.volume);
    p.median_removal_min = kv.get_double("r_t", p.median_removal_min);
    p.removal_lo_min = kv.get_double("removal_min", p.removal_lo_min);
    p.removal_hi_min = kv.get_double("removal_max", p.removal_hi_min);
    p.infectivity = kv.get_double("sigma", p.infectivity);
    p.infectious_days_min = (std::uint32_t)kv.get_int("tau_min", p.infectious_days_min);
    p.infectious_days_max = (std::uint32_t)kv.get_int("tau_max", p.infectious_days_max);
    p.incubation_days = (std::uint32_t)kv.get_int("incubation_days", p.incubation_days);
    p.seeds = (std::uint32_t)kv.get_int("seeds", p.seeds);
    return p;
}

struct GenerateCmd {
    std::string mode;
    std::uint32_t nodes = 0;
    std::uint32_t days = 0;
    std::string params_path;
    std::uint64_t seed = 0;
    std::string out;
    std::uint32_t step_seconds = 0; // 0: from params file / default 300
    std::int64_t delta_steps = -1;  // -1: from params file / default 36
    double eta = -1.0;
    double mu = -1.0;
    std::uint32_t threads = 0;
    std::uint64_t buffer_links = 1u << 24;
};

int cmd_generate(const GenerateCmd &cmd, const std::string &cmdline)
{
    KvFile kv;
    if (!cmd.params_path.empty())
        kv = KvFile::load(cmd.params_path);

    const std::uint32_t step_seconds =
        cmd.step_seconds ? cmd.step_seconds : (std::uint32_t)kv.get_int("step_seconds", 300);
    const TimeGrid grid = TimeGrid::from_days(step_seconds, cmd.days);

    std::uint64_t links = 0;
    if (cmd.mode == "gdt" || cmd.mode == "gdh") {
        ModelParams p;
        p.leave_prob = kv.get_double("rho", 0.085);
        p.arrive_prob = kv.get_double("q", 0.0048);
        p.link_create_prob = kv.get_double("p_c", 0.02);
        p.link_break_prob = kv.get_double("p_b", p.leave_prob);
        p.delta_steps = cmd.delta_steps >= 0 ? (std::uint32_t)cmd.delta_steps
                                             : (std::uint32_t)kv.get_int("delta_steps", 36);
        p.novelty_weight = cmd.eta >= 0 ? cmd.eta : kv.get_double("eta", 0.1);
        p.triadic_fraction = cmd.mu >= 0 ? cmd.mu : kv.get_double("mu", 0.4);
        p.n_nodes = cmd.nodes;
        p.grid = grid;
        p.master_seed = cmd.seed;
        p.threads = cmd.threads;
        if (cmd.mode == "gdt")
            p.degree = DegreeModel::heterogeneous(kv.get_double("beta", 2.963),
                                                  kv.get_double("xi", 0.26));
        else
            p.degree = DegreeModel::homogeneous(kv.get_double("lambda", 0.32));
        links = generate_network_to_dir(p, cmd.out, cmd.buffer_links);
    } else if (cmd.mode == "bdt" || cmd.mode == "bdh") {
        AdnParams adn;
        adn.activity = {kv.get_double("theta_exponent", 2.95), kv.get_double("theta_min", 0.02),
                        kv.get_double("theta_max", 0.18)};
        adn.links_per_activation = (std::uint32_t)kv.get_int("adn_m", 3);
        adn.adn_step_seconds = (std::uint32_t)kv.get_int("adn_step_seconds", 3000);
        if (cmd.mode == "bdt") {
            adn.heterogeneous_degree = true;
            adn.degree = DegreeModel::heterogeneous(kv.get_double("beta", 2.963),
                                                    kv.get_double("xi", 0.26));
        }
        links = generate_adn_to_dir(adn, cmd.nodes, grid, cmd.seed, cmd.out, cmd.threads,
                                    cmd.buffer_links);
    } else {
        throw usage_error("unknown mode '" + cmd.mode + "' (expected gdt|gdh|bdt|bdh)");
    }

    std::ostringstream log;
    log << kVersion << "\ncommand=" << cmdline << "\nmode=" << cmd.mode
        << "\nnodes=" << cmd.nodes << "\ndays=" << cmd.days << "\nstep_seconds=" << step_seconds
        << "\nseed=" << cmd.seed << "\nlinks_written=" << links << "\n";
    write_run_log(cmd.out, true, log.str());
    std::cout << "generated " << links << " links in " << cmd.out << "\n";
    return 0;
}

int cmd_fit(const std::string &ta, const std::string &h, const std::string &d,
            const std::string &tc, const std::string &td, const std::string &out,
            std::uint32_t step_seconds, std::uint32_t delta_steps, const std::string &cmdline)
{
    CipSamples samples;
    samples.active_periods = read_integer_column(ta);
    samples.activation_freqs = read_integer_column(h);
    samples.degrees = read_integer_column(d);
    samples.link_delays = read_integer_column(tc);
    samples.link_durations = read_integer_column(td);

    const TimeGrid grid = TimeGrid::from_days(step_seconds, 1);
    const FittedParams fitted = fit_all(samples, grid, delta_steps);

    KvFile kv;
    kv.set_double("rho", fitted.rho);
    kv.set_double("q", fitted.q);
    kv.set_double("lambda", fitted.lambda);
    kv.set_double("beta", fitted.beta);
    kv.set_double("xi", fitted.xi);
    kv.set_double("p_c", fitted.p_c);
    kv.set_double("p_b", fitted.p_b);
    kv.set_int("delta_steps", delta_steps);
    kv.set_int("step_seconds", step_seconds);
    kv.save(out);

    // Diagnostics go to the run log, not the parameter file.
    const double td_mle = fit_geometric(samples.link_durations);
    std::ostringstream log;
    log << kVersion << "\ncommand=" << cmdline << "\n"
        << "rho_loglik=" << fitted.rho_diag.log_likelihood << "\n"
        << "q_loglik=" << fitted.q_diag.log_likelihood << "\n"
        << "lambda_loglik=" << fitted.lambda_diag.log_likelihood << "\n"
        << "degree_loglik=" << fitted.degree_diag.log_likelihood
        << " rounds=" << fitted.degree_diag.iterations << "\n"
        << "beta_one_step=" << fitted.beta_one_step << " xi_one_step=" << fitted.xi_one_step
        << "\n"
        << "p_c_loglik=" << fitted.p_c_diag.log_likelihood
        << " iterations=" << fitted.p_c_diag.iterations
        << " boundary=" << (fitted.p_c_diag.boundary ? 1 : 0)
        << " dropped=" << fitted.p_c_dropped_samples << "\n"
        << "t_d_geometric_mle=" << td_mle << " (diagnostic only; p_b = rho)\n";
    write_run_log(out, false, log.str());
    std::cout << "fitted parameters written to " << out << "\n";
    return 0;
}

int cmd_simulate(const std::string &network, const std::string &disease, std::uint32_t runs,
                 std::uint64_t seed, const std::string &out, std::uint32_t days, bool events,
                 std::int64_t seeds_override, std::uint32_t threads, const std::string &cmdline)
{
    const ContactNetwork net = read_network(network);
    DiseaseParams params = load_disease(disease);
    if (seeds_override >= 0)
        params.seeds = (std::uint32_t)seeds_override;

    const SirResult result = run_sir(net, params, seed, runs, days, events, threads);

    fs::create_directories(out);
    std::string csv = "day,I_p_mean,I_p_std,I_a_mean,I_a_std\n";
    for (std::uint32_t d = 0; d < result.days; ++d) {
        csv += std::to_string(d) + ',' + format_double(result.prevalence_mean[d]) + ',' +
               format_double(result.prevalence_std[d]) + ',' +
               format_double(result.cumulative_mean[d]) + ',' +
               format_double(result.cumulative_std[d]) + '\n';
    }
    write_text_file(out + "/series.csv", csv);

    if (events) {
        std::string ev = "run,day,node,event\n";
        for (const SirEvent &e : result.events) {
            const char *kind = e.kind == SirEvent::Kind::Seed      ? "seed"
                               : e.kind == SirEvent::Kind::Infect ? "infect"
                                                                  : "recover";
            ev += std::to_string(e.run) + ',' + std::to_string(e.day) + ',' +
                  std::to_string(e.node) + ',' + kind + '\n';
        }
        write_text_file(out + "/events.csv", ev);
    }

    std::ostringstream log;
    log << kVersion << "\ncommand=" << cmdline << "\nnetwork=" << network << "\nruns=" << runs
        << "\nseed=" << seed << "\nseeds=" << params.seeds << "\ndays=" << result.days << "\n";
    write_run_log(out, true, log.str());
    std::cout << "simulated " << runs << " runs over " << result.days << " days -> " << out
              << "\n";
    return 0;
}

void write_histogram_csv(const Histogram &h, const std::string &path)
{
    std::string csv = "bin,proportion\n";
    for (std::size_t i = 0; i < h.proportions.size(); ++i)
        csv += format_double(double(i) * h.bin_width) + ',' + format_double(h.proportions[i]) +
               '\n';
    write_text_file(path, csv);
}

Histogram read_histogram_csv(const std::string &path)
{
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    Histogram h;
    std::vector<std::pair<double, double>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (first) {
            first = false;
            if (line.find("bin") != std::string::npos)
                continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw data_error(path + ": expected 'bin,proportion' rows");
        rows.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    }
    if (rows.empty())
        throw data_error(path + ": empty histogram");
    h.bin_width = rows.size() > 1 ? rows[1].first - rows[0].first : 1.0;
    h.proportions.reserve(rows.size());
    for (const auto &[bin, p] : rows)
        h.proportions.push_back(p);
    return h;
}

struct SeriesFile {
    std::vector<double> prevalence_mean, cumulative_mean;
};

SeriesFile read_series_csv(const std::string &path)
{
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    SeriesFile s;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (first) {
            first = false;
            if (line.find("day") != std::string::npos)
                continue;
        }
        std::istringstream row(line);
        std::string field;
        std::vector<double> fields;
        while (std::getline(row, field, ','))
            fields.push_back(std::stod(field));
        if (fields.size() < 5)
            throw data_error(path + ": expected day,I_p_mean,I_p_std,I_a_mean,I_a_std");
        s.prevalence_mean.push_back(fields[1]);
        s.cumulative_mean.push_back(fields[3]);
    }
    if (s.prevalence_mean.empty())
        throw data_error(path + ": empty series");
    return s;
}

int cmd_analyze(const std::string &network, const std::string &out, bool do_cip, bool do_static,
                bool do_daily, bool do_temporal, std::uint32_t temporal_sources,
                std::uint32_t max_gap_days, std::uint64_t seed, const std::string &cmdline)
{
    const ContactNetwork net = read_network(network);
    fs::create_directories(out);
    std::ostringstream log;
    log << kVersion << "\ncommand=" << cmdline << "\nnetwork=" << network << "\n";

    if (do_cip) {
        const CipHistograms h = cip_histograms(net);
        write_histogram_csv(h.active_period, out + "/cip_ta.csv");
        write_histogram_csv(h.waiting_period, out + "/cip_tw.csv");
        write_histogram_csv(h.activation_freq, out + "/cip_h.csv");
        write_histogram_csv(h.degree, out + "/cip_d.csv");
        write_histogram_csv(h.link_delay, out + "/cip_tc.csv");
        write_histogram_csv(h.link_duration, out + "/cip_td.csv");
        log << "cip=written\n";
    }
    if (do_static || do_daily) {
        const StaticMetrics m = static_metrics(net, do_daily);
        if (do_static) {
            std::string csv = "node,metric,value\n";
            for (NodeId v = 0; v < net.n_nodes; ++v) {
                csv += std::to_string(v) + ",out_degree," + std::to_string(m.out_degree[v]) +
                       '\n';
                csv += std::to_string(v) + ",in_degree," + std::to_string(m.in_degree[v]) + '\n';
                csv += std::to_string(v) + ",clustering," + format_double(m.clustering[v]) +
                       '\n';
            }
            write_text_file(out + "/static.csv", csv);
            log << "mean_clustering=" << format_double(m.mean_clustering) << "\n";
        }
        if (do_daily) {
            std::string csv = "day,metric,value\n";
            for (std::size_t d = 0; d < m.daily_avg_out_degree.size(); ++d) {
                csv += std::to_string(d) + ",avg_out_degree," +
                       format_double(m.daily_avg_out_degree[d]) + '\n';
                csv += std::to_string(d) + ",avg_clustering," +
                       format_double(m.daily_avg_clustering[d]) + '\n';
            }
            write_text_file(out + "/daily.csv", csv);
        }
    }
    if (do_temporal) {
        const DayAggregatedGraph graph = day_aggregate(net);
        std::vector<NodeId> sources;
        if (temporal_sources > 0 && temporal_sources < net.n_nodes) {
            RandomStream rng = RandomStream::derive(seed, 0x7e3);
            std::vector<std::uint8_t> taken(net.n_nodes, 0);
            while (sources.size() < temporal_sources) {
                const NodeId cand = (NodeId)rng.next_below(net.n_nodes);
                if (!taken[cand]) {
                    taken[cand] = 1;
                    sources.push_back(cand);
                }
            }
            std::sort(sources.begin(), sources.end());
            log << "temporal=approximate sources=" << temporal_sources << "\n";
            std::cerr << "temporal metrics from " << temporal_sources
                      << " sampled sources (approximate)\n";
        } else {
            log << "temporal=exact\n";
        }
        const TemporalMetrics t = temporal_metrics(graph, max_gap_days, sources);
        std::string csv = "node,metric,value\n";
        for (NodeId v = 0; v < net.n_nodes; ++v) {
            csv += std::to_string(v) + ",temporal_betweenness," +
                   format_double(t.betweenness[v]) + '\n';
            csv += std::to_string(v) + ",temporal_closeness," + format_double(t.closeness[v]) +
                   '\n';
        }
        write_text_file(out + "/temporal.csv", csv);
    }
    write_run_log(out, true, log.str());
    std::cout << "analysis written to " << out << "\n";
    return 0;
}

int cmd_compare(const std::string &kind, const std::string &a, const std::string &b,
                const std::string &out)
{
    if (kind == "rse") {
        const Histogram ha = read_histogram_csv(a);
        const Histogram hb = read_histogram_csv(b);
        const double err = rse(ha, hb);
        std::cout << "rse=" << format_double(err) << "\n";
        if (!out.empty())
            write_text_file(out, "rse\n" + format_double(err) + "\n");
        return 0;
    }
    if (kind == "apv") {
        const SeriesFile ref = read_series_csv(a);
        const SeriesFile obs = read_series_csv(b);
        const ApvResult prev = apv(ref.prevalence_mean, obs.prevalence_mean);
        const ApvResult cum = apv(ref.cumulative_mean, obs.cumulative_mean);
        std::string csv = "day,apv_prevalence,apv_cumulative\n";
        for (std::size_t d = 0; d < prev.per_day.size(); ++d)
            csv += std::to_string(d) + ',' + format_double(prev.per_day[d]) + ',' +
                   format_double(cum.per_day[d]) + '\n';
        std::cout << "apv_prevalence_mean=" << format_double(prev.average)
                  << " apv_cumulative_mean=" << format_double(cum.average) << "\n";
        if (!out.empty())
            write_text_file(out, csv);
        return 0;
    }
    throw usage_error("compare mode must be rse or apv, got '" + kind + "'");
}

int cmd_extract(const std::string &updates, const std::string &out, std::uint32_t step_seconds,
                std::int64_t delta_seconds, double radius_m, std::int64_t gap_min,
                const std::string &cmdline)
{
    const GpsTrace trace = load_gps_csv(updates);
    ExtractionParams params;
    params.step_seconds = step_seconds;
    params.delta_seconds = delta_seconds;
    params.radius_m = radius_m;
    params.gap_seconds = gap_min * 60;
    const ContactNetwork net = extract_network(trace, params);
    write_network(net, out);
    // Dense ids are positional; keep the original ids alongside.
    std::string map = "node_id,original_user_id\n";
    for (std::size_t i = 0; i < trace.original_ids.size(); ++i)
        map += std::to_string(i) + ',' + std::to_string(trace.original_ids[i]) + '\n';
    write_text_file(out + "/user_ids.csv", map);

    std::ostringstream log;
    log << kVersion << "\ncommand=" << cmdline << "\nupdates=" << updates
        << "\nusers=" << trace.n_users << "\nlinks=" << net.links.size()
        << "\ncopies=" << net.copies.size() << "\n";
    write_run_log(out, true, log.str());
    std::cout << "extracted " << net.links.size() << " links from " << trace.n_users
              << " users -> " << out << "\n";
    return 0;
}

int cmd_densify(const std::string &network, const std::string &out, std::uint64_t seed,
                bool single_fill, const std::string &cmdline)
{
    const ContactNetwork net = read_network(network);
    DensifyStats stats;
    const ContactNetwork dense = densify(net, seed, single_fill, &stats);
    write_network(dense, out);
    std::ostringstream log;
    log << kVersion << "\ncommand=" << cmdline << "\nseed=" << seed
        << "\nfilled_days=" << stats.filled_days << "\ncopied_links=" << stats.copied_links
        << "\nskipped_collisions=" << stats.skipped_collisions << "\n";
    write_run_log(out, true, log.str());
    std::cout << "densified: +" << stats.copied_links << " links over " << stats.filled_days
              << " filled days -> " << out << "\n";
    return 0;
}

int cmd_validate(const std::string &network)
{
    const std::string problem = validate_network_file(network);
    if (problem.empty()) {
        std::cout << "valid\n";
        return 0;
    }
    std::cerr << links_path(network) << ": " << problem << "\n";
    return 2;
}

} // namespace

int run_cli(const std::vector<std::string> &args)
{
    CLI::App app{"SPDT dynamic contact networks: fit, generate, analyze, simulate"};
    app.set_version_flag("--version", std::string(kVersion));
    // --h is a data option of `fit` (the activation-frequency file), so the
    // short help alias stays disabled everywhere.
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);
    const std::string cmdline = join_args(args);

    // generate
    GenerateCmd gen;
    auto *g = app.add_subcommand("generate", "synthesize a contact network");
    g->add_option("--mode", gen.mode, "gdt|gdh|bdt|bdh")->required();
    g->add_option("--nodes", gen.nodes, "node count")->required();
    g->add_option("--days", gen.days, "horizon in days")->required();
    g->add_option("--params", gen.params_path, "parameter kv file");
    g->add_option("--seed", gen.seed, "master seed")->required();
    g->add_option("-o,--out", gen.out, "output network directory")->required();
    g->add_option("--step-seconds", gen.step_seconds, "grid step (default from params/300)");
    g->add_option("--delta-steps", gen.delta_steps, "indirect window in steps");
    g->add_option("--eta", gen.eta, "reinforcement novelty weight");
    g->add_option("--mu", gen.mu, "contacts-of-contacts fraction");
    g->add_option("--threads", gen.threads, "worker threads (0 = cores)");
    g->add_option("--buffer-links", gen.buffer_links, "streaming buffer size in links");

    // fit
    std::string f_ta, f_h, f_d, f_tc, f_td, f_out;
    std::uint32_t f_step = 300, f_delta = 36;
    auto *f = app.add_subcommand("fit", "maximum-likelihood parameter estimation");
    f->add_option("--ta", f_ta, "active periods file (steps)")->required();
    f->add_option("--h", f_h, "daily activation frequencies file")->required();
    f->add_option("--d", f_d, "activation degrees file")->required();
    f->add_option("--tc", f_tc, "link creation delays file (steps)")->required();
    f->add_option("--td", f_td, "link durations file (steps)")->required();
    f->add_option("-o,--out", f_out, "output parameter kv file")->required();
    f->add_option("--step-seconds", f_step, "grid step seconds");
    f->add_option("--delta-steps", f_delta, "indirect window in steps");

    // simulate
    std::string s_net, s_dis, s_out;
    std::uint32_t s_runs = 100, s_days = 0, s_threads = 0;
    std::uint64_t s_seed = 0;
    std::int64_t s_seeds = -1;
    bool s_events = false;
    auto *s = app.add_subcommand("simulate", "SIR diffusion over a network");
    s->add_option("--network", s_net, "network directory")->required();
    s->add_option("--disease", s_dis, "disease parameter kv file")->required();
    s->add_option("--runs", s_runs, "Monte-Carlo repetitions");
    s->add_option("--seed", s_seed, "master seed")->required();
    s->add_option("-o,--out", s_out, "output directory")->required();
    s->add_option("--days", s_days, "days to simulate (default full horizon)");
    s->add_option("--seeds", s_seeds, "override seed node count");
    s->add_option("--threads", s_threads, "worker threads (0 = cores)");
    s->add_flag("--events", s_events, "write per-run event log");

    // analyze
    std::string a_net, a_out;
    bool a_cip = false, a_static = false, a_daily = false, a_temporal = false;
    std::uint32_t a_sources = 0, a_gap = 5;
    std::uint64_t a_seed = 0;
    auto *a = app.add_subcommand("analyze", "network metrics");
    a->add_option("--network", a_net, "network directory")->required();
    a->add_option("-o,--out", a_out, "output directory")->required();
    a->add_flag("--cip", a_cip, "CIP histograms");
    a->add_flag("--static", a_static, "degree and clustering metrics");
    a->add_flag("--daily", a_daily, "daily averages");
    a->add_flag("--temporal", a_temporal, "temporal betweenness/closeness");
    a->add_option("--temporal-sources", a_sources, "sample this many sources (0 = all, exact)");
    a->add_option("--max-gap-days", a_gap, "max day gap between consecutive hops");
    a->add_option("--seed", a_seed, "seed for source sampling");

    // compare
    std::string c_kind, c_a, c_b, c_out;
    auto *c = app.add_subcommand("compare", "RSE between histograms / APV between series");
    c->add_option("kind", c_kind, "rse|apv")->required();
    c->add_option("a", c_a, "reference file")->required();
    c->add_option("b", c_b, "observed file")->required();
    c->add_option("-o,--out", c_out, "optional CSV output");

    // extract
    std::string e_updates, e_out;
    std::uint32_t e_step = 300;
    std::int64_t e_delta = 10800, e_gap = 30;
    double e_radius = 20.0;
    auto *e = app.add_subcommand("extract", "build an SDT network from GPS updates");
    e->add_option("--updates", e_updates, "CSV: user_id,lat,lon,unix_timestamp")->required();
    e->add_option("-o,--out", e_out, "output network directory")->required();
    e->add_option("--step-seconds", e_step, "grid step seconds");
    e->add_option("--delta-seconds", e_delta, "indirect window in seconds");
    e->add_option("--radius-m", e_radius, "co-location radius in metres");
    e->add_option("--gap-min", e_gap, "max update gap within a stay, minutes");

    // densify
    std::string d_net, d_out;
    std::uint64_t d_seed = 0;
    bool d_single = false;
    auto *d = app.add_subcommand("densify", "fill missing host days (SDT -> DDT)");
    d->add_option("--network", d_net, "network directory")->required();
    d->add_option("-o,--out", d_out, "output network directory")->required();
    d->add_option("--seed", d_seed, "seed for day choices")->required();
    d->add_flag("--single-fill", d_single, "copy one available day to one missing day only");

    // validate
    std::string v_net;
    auto *v = app.add_subcommand("validate", "check a network file against all invariants");
    v->add_option("--network", v_net, "network directory")->required();

    try {
        std::vector<const char *> argv;
        argv.push_back("spdt");
        for (const auto &s2 : args)
            argv.push_back(s2.c_str());
        app.parse((int)argv.size(), argv.data());

        if (*g)
            return cmd_generate(gen, cmdline);
        if (*f)
            return cmd_fit(f_ta, f_h, f_d, f_tc, f_td, f_out, f_step, f_delta, cmdline);
        if (*s)
            return cmd_simulate(s_net, s_dis, s_runs, s_seed, s_out, s_days, s_events, s_seeds,
                                s_threads, cmdline);
        if (*a)
            return cmd_analyze(a_net, a_out, a_cip, a_static, a_daily, a_temporal, a_sources,
                               a_gap, a_seed, cmdline);
        if (*c)
            return cmd_compare(c_kind, c_a, c_b, c_out);
        if (*e)
            return cmd_extract(e_updates, e_out, e_step, e_delta, e_radius, e_gap, cmdline);
        if (*d)
            return cmd_densify(d_net, d_out, d_seed, d_single, cmdline);
        if (*v)
            return cmd_validate(v_net);
        throw usage_error("no subcommand given");
    } catch (const CLI::CallForHelp &help) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForVersion &) {
        std::cout << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError &pe) {
        std::cerr << pe.what() << "\n";
        return 1;
    } catch (const usage_error &ue) {
        std::cerr << "usage error: " << ue.what() << "\n";
        return 1;
    } catch (const fit_error &fe) {
        std::cerr << "fitting error: " << fe.what() << "\n";
        return 3;
    } catch (const data_error &de) {
        std::cerr << "data error: " << de.what() << "\n";
        return 2;
    } catch (const std::exception &ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}

} // namespace spdt
