#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "seclud/cluster.hpp"

namespace seclud {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    if constexpr (std::is_floating_point_v<T>) {
        try {
            std::size_t used = 0;
            out = static_cast<T>(std::stod(value, &used));
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw Error("config key '" + key + "': not a number: '" + value + "'");
        }
    } else {
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
            throw Error("config key '" + key + "': not a non-negative integer: '" + value + "'");
        }
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw Error("config key '" + key + "': expected true or false");
}

}  // namespace

ClusterConfig read_cluster_config(std::istream& in, ClusterConfig cfg) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw Error("config line " + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(std::string_view(body).substr(0, eq));
        auto value = trim(std::string_view(body).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key == "k") {
            cfg.k = parse_number<std::uint32_t>(key, value);
        } else if (key == "epsilon") {
            cfg.epsilon = parse_number<double>(key, value);
        } else if (key == "convergence_threshold") {
            cfg.convergence_threshold = parse_number<double>(key, value);
        } else if (key == "doc_grained_threshold") {
            cfg.doc_grained_threshold = parse_number<std::size_t>(key, value);
        } else if (key == "base_case_size") {
            cfg.base_case_size = parse_number<std::size_t>(key, value);
        } else if (key == "chi") {
            cfg.chi = parse_number<std::uint32_t>(key, value);
        } else if (key == "tc" || key == "TC") {
            cfg.tc = parse_number<std::size_t>(key, value);
        } else if (key == "max_rounds") {
            cfg.max_rounds = parse_number<std::uint32_t>(key, value);
        } else if (key == "seed") {
            cfg.seed = parse_number<std::uint64_t>(key, value);
        } else if (key == "threads") {
            cfg.threads = parse_number<unsigned>(key, value);
        } else if (key == "compact_leaves") {
            cfg.compact_leaves = parse_bool(key, value);
        } else {
            throw Error("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

void write_cluster_config(std::ostream& out, const ClusterConfig& c) {
    out << "k = " << c.k << "\n"
        << "epsilon = " << c.epsilon << "\n"
        << "convergence_threshold = " << c.convergence_threshold << "\n"
        << "doc_grained_threshold = " << c.doc_grained_threshold << "\n"
        << "base_case_size = " << c.base_case_size << "\n"
        << "chi = " << c.chi << "\n"
        << "tc = " << c.tc << "\n"
        << "max_rounds = " << c.max_rounds << "\n"
        << "seed = " << c.seed << "\n"
        << "threads = " << c.threads << "\n"
        << "compact_leaves = " << (c.compact_leaves ? "true" : "false") << "\n";
}

void write_clustering_csv(std::ostream& out, const Clustering& c) {
    out << "doc_id,cluster_id\n";
    for (std::size_t d = 0; d < c.assign.size(); ++d) out << d << ',' << c.assign[d] << '\n';
}

Clustering read_clustering_csv(std::istream& in, std::size_t num_docs) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "doc_id,cluster_id") {
        throw Error("clustering CSV must start with the header 'doc_id,cluster_id'");
    }
    std::vector<ClusterId> assign(num_docs, 0);
    std::vector<char> seen(num_docs, 0);
    std::uint32_t k = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto comma = body.find(',');
        if (comma == std::string::npos) throw Error("clustering CSV line " + std::to_string(line_no) + ": missing comma");
        const auto doc = parse_number<std::size_t>("doc_id", trim(std::string_view(body).substr(0, comma)));
        const auto cluster = parse_number<ClusterId>("cluster_id", trim(std::string_view(body).substr(comma + 1)));
        if (doc >= num_docs) throw Error("clustering CSV line " + std::to_string(line_no) + ": doc_id out of range");
        if (seen[doc]) throw Error("clustering CSV line " + std::to_string(line_no) + ": duplicate doc_id");
        seen[doc] = 1;
        assign[doc] = cluster;
        k = std::max(k, cluster + 1);
    }
    for (std::size_t d = 0; d < num_docs; ++d) {
        if (!seen[d]) throw Error("clustering CSV misses document " + std::to_string(d));
    }
    return Clustering::from_assignment(std::move(assign), k);
}

}  // namespace seclud
