#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ignn/graph.hpp"
#include "ignn/matrix.hpp"
#include "ignn/propagation.hpp"

namespace ignn {

struct ParseError : std::runtime_error {
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
    explicit ParseError(const std::string& what) : std::runtime_error(what), line(0) {}
    std::size_t line;
};

// --- dense matrix file: "IGNN" magic, u16 version, u64 rows, u64 cols,
// row-major float64 payload, everything little-endian ---

void write_matrix(std::ostream& out, const Matrix& m);
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(std::istream& in);
Matrix read_matrix(const std::filesystem::path& path);

// --- edge list text: "n <count>" header, one "u v" pair per line,
// '#' starts a comment ---

struct EdgeListResult {
    Graph graph;
    std::size_t duplicates = 0; // repeated pairs collapsed while loading
};

EdgeListResult load_edge_list(std::istream& in);
EdgeListResult load_edge_list(const std::filesystem::path& path);
void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list(const std::filesystem::path& path, const Graph& g);

// --- event log text: same header, lines "i u v" (insert) / "d u v" (delete) ---

EventLog load_event_log(std::istream& in);
EventLog load_event_log(const std::filesystem::path& path);
void write_event_log(std::ostream& out, const EventLog& log);
void write_event_log(const std::filesystem::path& path, const EventLog& log);

// --- drift log text: lines "<event_index> <drift> [<baseline>]" ---

struct DriftRecord {
    std::size_t event_index = 0;
    double drift = 0.0;
    std::optional<double> baseline; // required by relative-threshold runs
};

std::vector<DriftRecord> load_drift_log(std::istream& in);
std::vector<DriftRecord> load_drift_log(const std::filesystem::path& path);

// --- run manifest: ordered "key=value" lines ---

using Manifest = std::vector<std::pair<std::string, std::string>>;

void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);
std::optional<std::string> manifest_value(const Manifest& m, const std::string& key);

// Round-trip-safe decimal form of a double.
std::string format_double(double v);
double parse_double(const std::string& text);

// FNV-1a 64 over the file's bytes, as fixed-width hex.
std::string file_digest(const std::filesystem::path& path);

// --- state directory: graph.txt + signal/estimate/residual matrices +
// state.manifest carrying the propagation configuration ---

void save_state(const std::filesystem::path& dir, const Graph& g, const PropagationState& state,
                const PropagationConfig& cfg);

struct LoadedState {
    Graph graph;
    PropagationState state;
    PropagationConfig config;
};

LoadedState load_state(const std::filesystem::path& dir);

}  // namespace ignn
