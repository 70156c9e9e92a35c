// Command line front end: state lifecycle (init/apply/verify/snapshot),
// synthetic dynamic-graph generation, and retrain planning.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <span>
#include <string>
#include <vector>

#include "ignn/adaptive.hpp"
#include "ignn/graph.hpp"
#include "ignn/instant_update.hpp"
#include "ignn/io.hpp"
#include "ignn/oracle.hpp"
#include "ignn/propagation.hpp"
#include "ignn/synth.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kParseFailure = 2;
constexpr int kInvariantFailure = 3;
constexpr int kBoundFailure = 4;
constexpr int kInfeasible = 5;

constexpr double kInvariantTolerance = 1e-9;
constexpr double kBoundSlack = 1e-12;

struct InitArgs {
    std::string graph, features, out_state;
    double alpha = 0.2, beta = 0.5, epsilon = 1e-7;
    unsigned threads = 1;
};

struct ApplyArgs {
    std::string state, events, out_state;
    std::size_t batch = 0; // 0/1: one push per event
    unsigned threads = 1;
};

struct VerifyArgs {
    std::string state, graph, features;
    long long column = -1; // -1: all columns
};

struct GenSbmArgs {
    std::string out_dir;
    std::size_t nodes = 1000, blocks = 5, migrants = 50, snapshots = 10, dims = 8;
    double intra = 20.0, inter = 1.0, density = 0.01;
    std::uint64_t seed = 1;
};

struct ScheduleArgs {
    std::string drift_log, out, mode = "abs";
    double theta = 1.0;
    std::size_t budget = 3, total_events = 0, first_triggers = 3;
};

struct SnapshotArgs {
    std::string state, out;
};

void emit(const std::filesystem::path& path, const ignn::Manifest& manifest) {
    ignn::write_manifest(path, manifest);
}

int run_init(const InitArgs& args) {
    ignn::PropagationConfig cfg{args.alpha, args.beta, args.epsilon};
    cfg.validate();
    ignn::EdgeListResult loaded = ignn::load_edge_list(args.graph);
    if (loaded.duplicates > 0)
        std::cerr << "warning: collapsed " << loaded.duplicates << " duplicate edges\n";
    ignn::Matrix signal = ignn::read_matrix(args.features);
    ignn::PropagationState state = ignn::new_state(loaded.graph, std::move(signal));
    ignn::PushStats stats = ignn::basic_propagate(loaded.graph, cfg, state, args.threads);
    ignn::save_state(args.out_state, loaded.graph, state, cfg);
    emit(std::filesystem::path(args.out_state) / "run.manifest",
         {{"command", "init"},
          {"graph", args.graph},
          {"graph_digest", ignn::file_digest(args.graph)},
          {"features", args.features},
          {"features_digest", ignn::file_digest(args.features)},
          {"alpha", ignn::format_double(cfg.alpha)},
          {"beta", ignn::format_double(cfg.beta)},
          {"epsilon", ignn::format_double(cfg.epsilon)},
          {"threads", std::to_string(args.threads)},
          {"duplicate_edges", std::to_string(loaded.duplicates)},
          {"pushes", std::to_string(stats.pushes)},
          {"touched_entries", std::to_string(stats.touched_entries)},
          {"wall_seconds", ignn::format_double(stats.wall_seconds)}});
    std::cout << "initialized " << loaded.graph.node_count() << " nodes, " << state.dims()
              << " dims, " << stats.pushes << " pushes\n";
    return kOk;
}

int run_apply(const ApplyArgs& args) {
    ignn::LoadedState ls = ignn::load_state(args.state);
    ignn::EventLog log = ignn::load_event_log(args.events);
    if (log.node_count != ls.graph.node_count())
        throw ignn::ParseError("event log node count " + std::to_string(log.node_count) +
                               " does not match state (" +
                               std::to_string(ls.graph.node_count()) + ")");

    ignn::UpdateReport total;
    std::span<const ignn::GraphEvent> events(log.events);
    if (args.batch <= 1) {
        total = ignn::apply_events(ls.graph, ls.state, ls.config, events, args.threads);
    } else {
        for (std::size_t off = 0; off < events.size(); off += args.batch) {
            std::size_t len = std::min(args.batch, events.size() - off);
            ignn::UpdateReport r = ignn::batch_update(ls.graph, ls.state, ls.config,
                                                      events.subspan(off, len), args.threads);
            total.events_applied += r.events_applied;
            total.residual_increments += r.residual_increments;
            total.push_stats += r.push_stats;
        }
    }

    ignn::save_state(args.out_state, ls.graph, ls.state, ls.config);
    double per_event = total.events_applied
                           ? static_cast<double>(total.push_stats.pushes) /
                                 static_cast<double>(total.events_applied)
                           : 0.0;
    emit(std::filesystem::path(args.out_state) / "run.manifest",
         {{"command", "apply"},
          {"state", args.state},
          {"events", args.events},
          {"events_digest", ignn::file_digest(args.events)},
          {"batch", std::to_string(args.batch)},
          {"threads", std::to_string(args.threads)},
          {"events_applied", std::to_string(total.events_applied)},
          {"residual_increments", std::to_string(total.residual_increments)},
          {"pushes", std::to_string(total.push_stats.pushes)},
          {"pushes_per_event", ignn::format_double(per_event)},
          {"touched_entries", std::to_string(total.push_stats.touched_entries)},
          {"wall_seconds", ignn::format_double(total.push_stats.wall_seconds)}});
    std::cout << "applied " << total.events_applied << " events, " << total.push_stats.pushes
              << " pushes\n";
    return kOk;
}

int run_verify(const VerifyArgs& args) {
    ignn::LoadedState ls = ignn::load_state(args.state);
    ignn::EdgeListResult given = ignn::load_edge_list(args.graph);
    ignn::Matrix features = ignn::read_matrix(args.features);

    if (given.graph.node_count() != ls.state.node_count())
        throw ignn::ParseError("graph node count does not match state");
    if (!features.same_shape(ls.state.signal))
        throw ignn::ParseError("features shape does not match state signal");
    for (std::size_t i = 0; i < features.size(); ++i)
        if (features.data()[i] != ls.state.signal.data()[i])
            throw ignn::ParseError("features differ from the signal stored in the state");

    std::size_t lo = 0, hi = ls.state.dims();
    if (args.column >= 0) {
        if (static_cast<std::size_t>(args.column) >= hi)
            throw ignn::ParseError("column out of range");
        lo = static_cast<std::size_t>(args.column);
        hi = lo + 1;
    }

    ignn::DenseSolver solver(given.graph, ls.config);
    bool invariant_ok = true, bound_ok = true;
    ignn::Manifest manifest{{"command", "verify"}, {"state", args.state}};
    for (std::size_t col = lo; col < hi; ++col) {
        double defect = ignn::check_invariant(given.graph, ls.config, ls.state, col);
        double signal_peak = 0.0;
        for (std::size_t s = 0; s < ls.state.node_count(); ++s)
            signal_peak = std::max(signal_peak, std::fabs(ls.state.signal(s, col)));
        double tolerance = kInvariantTolerance * (1.0 + signal_peak);
        ignn::BoundReport bound =
            ignn::check_error_bound(given.graph, ls.config, ls.state, col, solver);

        bool inv_pass = defect <= tolerance;
        bool bnd_pass = bound.max_violation <= kBoundSlack;
        invariant_ok = invariant_ok && inv_pass;
        bound_ok = bound_ok && bnd_pass;
        std::cout << "column " << col << ": identity defect " << defect << " (tol " << tolerance
                  << "), bound margin " << bound.max_violation << " at node "
                  << bound.worst_node << (inv_pass && bnd_pass ? " ok" : " FAIL") << "\n";
        manifest.emplace_back("column_" + std::to_string(col) + "_defect",
                              ignn::format_double(defect));
        manifest.emplace_back("column_" + std::to_string(col) + "_bound_margin",
                              ignn::format_double(bound.max_violation));
    }
    manifest.emplace_back("invariant_ok", invariant_ok ? "1" : "0");
    manifest.emplace_back("bound_ok", bound_ok ? "1" : "0");
    emit(std::filesystem::path(args.state) / "verify.manifest", manifest);

    if (!invariant_ok) return kInvariantFailure;
    if (!bound_ok) return kBoundFailure;
    std::cout << "state verified\n";
    return kOk;
}

int run_gen_sbm(const GenSbmArgs& args) {
    ignn::SbmConfig cfg;
    cfg.nodes = args.nodes;
    cfg.blocks = args.blocks;
    cfg.intra_degree = args.intra;
    cfg.inter_degree = args.inter;
    cfg.migrants_per_step = args.migrants;
    cfg.seed = args.seed;
    cfg.validate();

    std::filesystem::path dir(args.out_dir);
    std::filesystem::create_directories(dir);
    ignn::SbmGraph sg = ignn::sbm_init(cfg);
    ignn::write_edge_list(dir / "init_edges.txt", sg.graph);
    ignn::Matrix features =
        ignn::sparse_random_signal(args.nodes, args.dims, args.density, sg.rng);
    ignn::write_matrix(dir / "features.bin", features);

    auto write_labels = [&](std::size_t step) {
        std::ofstream out(dir / ("labels_" + std::to_string(step) + ".txt"));
        for (std::uint32_t b : sg.labels.block)
            out << b << "\n";
    };
    write_labels(0);

    ignn::Manifest manifest{{"command", "gen-sbm"},
                            {"nodes", std::to_string(args.nodes)},
                            {"blocks", std::to_string(args.blocks)},
                            {"intra", ignn::format_double(args.intra)},
                            {"inter", ignn::format_double(args.inter)},
                            {"migrants", std::to_string(args.migrants)},
                            {"snapshots", std::to_string(args.snapshots)},
                            {"dims", std::to_string(args.dims)},
                            {"density", ignn::format_double(args.density)},
                            {"seed", std::to_string(args.seed)},
                            {"init_edges", std::to_string(sg.graph.edge_count())}};
    for (std::size_t step = 1; step <= args.snapshots; ++step) {
        std::vector<ignn::GraphEvent> events =
            ignn::sbm_migrate(sg.graph, sg.labels, cfg, sg.rng);
        ignn::EventLog log{args.nodes, std::move(events)};
        ignn::write_event_log(dir / ("events_" + std::to_string(step) + ".txt"), log);
        write_labels(step);
        manifest.emplace_back("events_" + std::to_string(step),
                              std::to_string(log.events.size()));
    }
    manifest.emplace_back("final_edges", std::to_string(sg.graph.edge_count()));
    emit(dir / "run.manifest", manifest);
    std::cout << "generated " << args.snapshots << " snapshots in " << args.out_dir << "\n";
    return kOk;
}

int run_schedule(const ScheduleArgs& args) {
    bool relative = args.mode == "rel";
    if (!relative && args.mode != "abs")
        throw ignn::ParseError("mode must be 'abs' or 'rel'");
    std::vector<ignn::DriftRecord> records = ignn::load_drift_log(args.drift_log);
    if (records.empty())
        throw ignn::ParseError("drift log is empty");

    ignn::ScheduleState sched;
    sched.mode = relative ? ignn::ThresholdMode::Relative : ignn::ThresholdMode::Absolute;
    sched.theta = args.theta;
    sched.budget = args.budget;

    for (const ignn::DriftRecord& rec : records) {
        if (relative) {
            if (!rec.baseline)
                throw ignn::ParseError("relative mode needs a baseline column in the drift log");
            sched.baseline_norm = *rec.baseline;
        }
        sched.observe({rec.event_index, rec.drift});
        if (sched.observed_triggers >= args.first_triggers)
            break;
    }

    ignn::SchedulePrediction predicted;
    ignn::PowerLawFit fit{};
    bool fitted = false;
    if (sched.observed_triggers < sched.budget) {
        std::vector<ignn::DriftSample> usable;
        for (const ignn::DriftSample& s : sched.drift_history)
            if (s.event_index >= 1 && s.drift > 0.0)
                usable.push_back(s);
        if (usable.size() < 3)
            throw ignn::ParseError("need at least 3 positive drift samples to extrapolate");
        fit = ignn::fit_power_law(usable);
        fitted = true;
        ignn::ScheduleState projector = sched;
        if (relative) {
            projector.mode = ignn::ThresholdMode::Absolute;
            projector.theta = args.theta * sched.baseline_norm;
        }
        std::size_t horizon = args.total_events;
        if (horizon == 0)
            horizon = records.back().event_index;
        predicted = ignn::predict_schedule(projector, horizon, fit);
    }

    std::ofstream out(args.out);
    if (!out)
        throw std::runtime_error("cannot write " + args.out);
    for (std::size_t t : sched.trigger_times)
        out << t << "\n";
    for (std::size_t t : predicted.indices)
        out << t << "\n";
    out.flush();

    ignn::Manifest manifest{{"command", "schedule"},
                            {"drift_log", args.drift_log},
                            {"mode", args.mode},
                            {"theta", ignn::format_double(args.theta)},
                            {"budget", std::to_string(args.budget)},
                            {"observed", std::to_string(sched.trigger_times.size())},
                            {"predicted", std::to_string(predicted.indices.size())},
                            {"clamped", predicted.clamped ? "1" : "0"}};
    if (fitted) {
        manifest.emplace_back("fit_a", ignn::format_double(fit.a));
        manifest.emplace_back("fit_b", ignn::format_double(fit.b));
        manifest.emplace_back("fit_rms", ignn::format_double(fit.rms));
    }
    emit(args.out + ".manifest", manifest);
    std::cout << "planned " << (sched.trigger_times.size() + predicted.indices.size())
              << " retrains\n";
    return kOk;
}

int run_snapshot(const SnapshotArgs& args) {
    ignn::LoadedState ls = ignn::load_state(args.state);
    ignn::write_matrix(args.out, ignn::embedding(ls.state));
    emit(args.out + ".manifest",
         {{"command", "snapshot"},
          {"state", args.state},
          {"nodes", std::to_string(ls.state.node_count())},
          {"dims", std::to_string(ls.state.dims())},
          {"digest", ignn::file_digest(args.out)}});
    std::cout << "wrote embedding " << args.out << "\n";
    return kOk;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ignn::OracleInfeasible& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParseFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"incremental graph propagation engine"};
    app.require_subcommand(1);

    InitArgs init_args;
    CLI::App* init = app.add_subcommand("init", "propagate a signal over a graph from scratch");
    init->add_option("--graph", init_args.graph, "edge list file")->required();
    init->add_option("--features", init_args.features, "signal matrix file")->required();
    init->add_option("--out-state", init_args.out_state, "output state directory")->required();
    init->add_option("--alpha", init_args.alpha)->envname("IGNN_ALPHA");
    init->add_option("--beta", init_args.beta)->envname("IGNN_BETA");
    init->add_option("--epsilon", init_args.epsilon)->envname("IGNN_EPSILON");
    init->add_option("--threads", init_args.threads)->envname("IGNN_THREADS");

    ApplyArgs apply_args;
    CLI::App* apply = app.add_subcommand("apply", "replay edge events onto a state");
    apply->add_option("--state", apply_args.state, "input state directory")->required();
    apply->add_option("--events", apply_args.events, "event log file")->required();
    apply->add_option("--out-state", apply_args.out_state, "output state directory")->required();
    apply->add_option("--batch", apply_args.batch, "events per amortized pass (0: per event)")
        ->envname("IGNN_BATCH");
    apply->add_option("--threads", apply_args.threads)->envname("IGNN_THREADS");

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify", "check a state against the references");
    verify->add_option("--state", verify_args.state)->required();
    verify->add_option("--graph", verify_args.graph, "edge list to verify against")->required();
    verify->add_option("--features", verify_args.features, "signal matrix to verify against")
        ->required();
    verify->add_option("--column", verify_args.column, "single column (-1: all)");

    GenSbmArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen-sbm", "generate a drifting block-model stream");
    gen->add_option("--out-dir", gen_args.out_dir)->required();
    gen->add_option("--nodes", gen_args.nodes);
    gen->add_option("--blocks", gen_args.blocks);
    gen->add_option("--intra", gen_args.intra, "expected within-block degree");
    gen->add_option("--inter", gen_args.inter, "expected cross-block degree");
    gen->add_option("--migrants", gen_args.migrants, "nodes moved per snapshot");
    gen->add_option("--snapshots", gen_args.snapshots);
    gen->add_option("--dims", gen_args.dims, "feature dimensions");
    gen->add_option("--density", gen_args.density, "feature density");
    gen->add_option("--seed", gen_args.seed)->envname("IGNN_SEED");

    ScheduleArgs sched_args;
    CLI::App* sched = app.add_subcommand("schedule", "plan retrains from a drift log");
    sched->add_option("--drift-log", sched_args.drift_log)->required();
    sched->add_option("--out", sched_args.out, "retrain plan output")->required();
    sched->add_option("--theta", sched_args.theta, "drift threshold")->required();
    sched->add_option("--mode", sched_args.mode, "abs or rel");
    sched->add_option("--budget", sched_args.budget, "total retrains allowed");
    sched->add_option("--total-events", sched_args.total_events,
                      "stream length (default: last log index)");
    sched->add_option("--first-triggers", sched_args.first_triggers,
                      "observed triggers before extrapolating");

    SnapshotArgs snap_args;
    CLI::App* snap = app.add_subcommand("snapshot", "export the embedding matrix");
    snap->add_option("--state", snap_args.state)->required();
    snap->add_option("--out", snap_args.out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kParseFailure;
    }

    if (init->parsed()) return guarded([&] { return run_init(init_args); });
    if (apply->parsed()) return guarded([&] { return run_apply(apply_args); });
    if (verify->parsed()) return guarded([&] { return run_verify(verify_args); });
    if (gen->parsed()) return guarded([&] { return run_gen_sbm(gen_args); });
    if (sched->parsed()) return guarded([&] { return run_schedule(sched_args); });
    if (snap->parsed()) return guarded([&] { return run_snapshot(snap_args); });
    return kParseFailure;
}
