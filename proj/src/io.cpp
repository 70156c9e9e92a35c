#include "ignn/io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace ignn {

namespace {

constexpr char kMagic[4] = {'I', 'G', 'N', 'N'};
constexpr std::uint16_t kMatrixVersion = 1;
constexpr std::uint16_t kStateFormat = 1;

void put_u16(std::ostream& out, std::uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    out.write(b, 2);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

bool get_bytes(std::istream& in, char* b, std::size_t n) {
    in.read(b, static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in.gcount()) == n;
}

std::uint16_t get_u16(std::istream& in) {
    unsigned char b[2];
    if (!get_bytes(in, reinterpret_cast<char*>(b), 2))
        throw ParseError("matrix file truncated");
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    if (!get_bytes(in, reinterpret_cast<char*>(b), 8))
        throw ParseError("matrix file truncated");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::uint64_t parse_index(const std::string& tok, std::size_t line) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError(line, "expected non-negative integer, got '" + tok + "'");
    return v;
}

double parse_number(const std::string& tok, std::size_t line) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError(line, "expected number, got '" + tok + "'");
    return v;
}

// Strips comments, splits into tokens, feeds non-empty lines to fn.
template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        fn(number, tokens);
    }
}

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

void write_matrix(std::ostream& out, const Matrix& m) {
    out.write(kMagic, 4);
    put_u16(out, kMatrixVersion);
    put_u64(out, m.rows());
    put_u64(out, m.cols());
    for (std::size_t i = 0; i < m.size(); ++i)
        put_f64(out, m.data()[i]);
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
    auto out = open_output(path, std::ios::binary);
    write_matrix(out, m);
    finish_output(out, path);
}

Matrix read_matrix(std::istream& in) {
    char magic[4];
    if (!get_bytes(in, magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw ParseError("bad matrix magic");
    std::uint16_t version = get_u16(in);
    if (version != kMatrixVersion)
        throw ParseError("unsupported matrix version " + std::to_string(version));
    std::uint64_t rows = get_u64(in);
    std::uint64_t cols = get_u64(in);
    if (rows != 0 && cols > std::numeric_limits<std::size_t>::max() / 8 / rows)
        throw ParseError("matrix dimensions overflow");
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) {
        std::uint64_t bits = get_u64(in);
        std::memcpy(&m.data()[i], &bits, 8);
    }
    char extra;
    if (in.read(&extra, 1).gcount() != 0)
        throw ParseError("trailing bytes after matrix payload");
    return m;
}

Matrix read_matrix(const std::filesystem::path& path) {
    auto in = open_input(path, std::ios::binary);
    return read_matrix(in);
}

EdgeListResult load_edge_list(std::istream& in) {
    std::optional<std::size_t> node_count;
    std::optional<Graph> graph;
    std::size_t duplicates = 0;
    for_each_line(in, [&](std::size_t line, const std::vector<std::string>& tok) {
        if (!node_count) {
            if (tok.size() != 2 || tok[0] != "n")
                throw ParseError(line, "expected header 'n <count>'");
            node_count = parse_index(tok[1], line);
            graph.emplace(*node_count);
            return;
        }
        if (tok.size() != 2)
            throw ParseError(line, "expected edge line '<u> <v>'");
        std::uint64_t u = parse_index(tok[0], line);
        std::uint64_t v = parse_index(tok[1], line);
        if (u >= *node_count || v >= *node_count)
            throw ParseError(line, "node id out of range");
        if (u == v)
            throw ParseError(line, "self-loops are implicit and may not be listed");
        if (graph->has_edge(static_cast<NodeId>(u), static_cast<NodeId>(v))) {
            ++duplicates;
            return;
        }
        graph->insert_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
    });
    if (!node_count)
        throw ParseError("missing 'n <count>' header");
    return EdgeListResult{std::move(*graph), duplicates};
}

EdgeListResult load_edge_list(const std::filesystem::path& path) {
    auto in = open_input(path, std::ios::in);
    return load_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
    out << "n " << g.node_count() << "\n";
    for (auto [u, v] : g.edges())
        out << u << " " << v << "\n";
}

void write_edge_list(const std::filesystem::path& path, const Graph& g) {
    auto out = open_output(path, std::ios::out);
    write_edge_list(out, g);
    finish_output(out, path);
}

EventLog load_event_log(std::istream& in) {
    EventLog log;
    bool have_header = false;
    for_each_line(in, [&](std::size_t line, const std::vector<std::string>& tok) {
        if (!have_header) {
            if (tok.size() != 2 || tok[0] != "n")
                throw ParseError(line, "expected header 'n <count>'");
            log.node_count = parse_index(tok[1], line);
            have_header = true;
            return;
        }
        if (tok.size() != 3 || (tok[0] != "i" && tok[0] != "d"))
            throw ParseError(line, "expected event line 'i|d <u> <v>'");
        std::uint64_t u = parse_index(tok[1], line);
        std::uint64_t v = parse_index(tok[2], line);
        if (u >= log.node_count || v >= log.node_count)
            throw ParseError(line, "node id out of range");
        if (u == v)
            throw ParseError(line, "self-loop events are not allowed");
        log.events.push_back({tok[0] == "i" ? EventKind::InsertEdge : EventKind::DeleteEdge,
                              static_cast<NodeId>(u), static_cast<NodeId>(v)});
    });
    if (!have_header)
        throw ParseError("missing 'n <count>' header");
    return log;
}

EventLog load_event_log(const std::filesystem::path& path) {
    auto in = open_input(path, std::ios::in);
    return load_event_log(in);
}

void write_event_log(std::ostream& out, const EventLog& log) {
    out << "n " << log.node_count << "\n";
    for (const GraphEvent& ev : log.events)
        out << (ev.kind == EventKind::InsertEdge ? "i " : "d ") << ev.u << " " << ev.v << "\n";
}

void write_event_log(const std::filesystem::path& path, const EventLog& log) {
    auto out = open_output(path, std::ios::out);
    write_event_log(out, log);
    finish_output(out, path);
}

std::vector<DriftRecord> load_drift_log(std::istream& in) {
    std::vector<DriftRecord> records;
    for_each_line(in, [&](std::size_t line, const std::vector<std::string>& tok) {
        if (tok.size() != 2 && tok.size() != 3)
            throw ParseError(line, "expected '<event_index> <drift> [<baseline>]'");
        DriftRecord rec;
        rec.event_index = parse_index(tok[0], line);
        rec.drift = parse_number(tok[1], line);
        if (tok.size() == 3)
            rec.baseline = parse_number(tok[2], line);
        records.push_back(rec);
    });
    return records;
}

std::vector<DriftRecord> load_drift_log(const std::filesystem::path& path) {
    auto in = open_input(path, std::ios::in);
    return load_drift_log(in);
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
    auto out = open_output(path, std::ios::out);
    for (const auto& [key, value] : m)
        out << key << "=" << value << "\n";
    finish_output(out, path);
}

Manifest read_manifest(const std::filesystem::path& path) {
    auto in = open_input(path, std::ios::in);
    Manifest m;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(number, "expected 'key=value'");
        m.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return m;
}

std::optional<std::string> manifest_value(const Manifest& m, const std::string& key) {
    for (const auto& [k, v] : m)
        if (k == key) return v;
    return std::nullopt;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& text) {
    return parse_number(text, 0);
}

std::string file_digest(const std::filesystem::path& path) {
    auto in = open_input(path, std::ios::binary);
    std::uint64_t hash = 14695981039346656037ull;
    char buf[4096];
    while (in.read(buf, sizeof buf), in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ull;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

void save_state(const std::filesystem::path& dir, const Graph& g, const PropagationState& state,
                const PropagationConfig& cfg) {
    if (state.poisoned)
        throw std::runtime_error("save_state: refusing to persist a poisoned state");
    if (state.node_count() != g.node_count())
        throw std::invalid_argument("save_state: state and graph disagree on node count");
    std::filesystem::create_directories(dir);
    write_edge_list(dir / "graph.txt", g);
    write_matrix(dir / "signal.bin", state.signal);
    write_matrix(dir / "estimate.bin", state.estimate);
    write_matrix(dir / "residual.bin", state.residual);
    Manifest m{
        {"format", std::to_string(kStateFormat)},
        {"nodes", std::to_string(g.node_count())},
        {"dims", std::to_string(state.dims())},
        {"alpha", format_double(cfg.alpha)},
        {"beta", format_double(cfg.beta)},
        {"epsilon", format_double(cfg.epsilon)},
    };
    write_manifest(dir / "state.manifest", m);
}

LoadedState load_state(const std::filesystem::path& dir) {
    Manifest m = read_manifest(dir / "state.manifest");
    auto require = [&](const std::string& key) {
        auto v = manifest_value(m, key);
        if (!v)
            throw ParseError("state.manifest missing key '" + key + "'");
        return *v;
    };
    if (require("format") != std::to_string(kStateFormat))
        throw ParseError("unsupported state format " + require("format"));
    std::size_t nodes = parse_index(require("nodes"), 0);
    std::size_t dims = parse_index(require("dims"), 0);
    PropagationConfig cfg;
    cfg.alpha = parse_double(require("alpha"));
    cfg.beta = parse_double(require("beta"));
    cfg.epsilon = parse_double(require("epsilon"));
    cfg.validate();

    EdgeListResult loaded = load_edge_list(dir / "graph.txt");
    if (loaded.graph.node_count() != nodes)
        throw ParseError("state graph disagrees with manifest node count");

    PropagationState state;
    state.signal = read_matrix(dir / "signal.bin");
    state.estimate = read_matrix(dir / "estimate.bin");
    state.residual = read_matrix(dir / "residual.bin");
    if (state.signal.rows() != nodes || state.signal.cols() != dims ||
        !state.signal.same_shape(state.estimate) || !state.signal.same_shape(state.residual))
        throw ParseError("state matrices disagree with manifest shape");
    return LoadedState{std::move(loaded.graph), std::move(state), cfg};
}

}  // namespace ignn
