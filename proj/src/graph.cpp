#include "gadsel/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "gadsel/errors.hpp"
#include "gadsel/rng.hpp"
#include "gadsel/util.hpp"

namespace gadsel {

AttributedGraph::AttributedGraph(std::size_t n, std::vector<Edge> edges,
                                 std::vector<double> attributes,
                                 std::size_t attr_dim,
                                 std::optional<std::vector<std::uint8_t>> labels)
    : n_(n),
      d_(attr_dim),
      attributes_(std::move(attributes)),
      labels_(std::move(labels)),
      label_reads_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
    if (d_ < 1) throw ShapeError("attribute dimension must be >= 1");
    if (attributes_.size() != n_ * d_)
        throw ShapeError("attribute matrix has " +
                         std::to_string(attributes_.size() / std::max<std::size_t>(d_, 1)) +
                         " rows, expected " + std::to_string(n_));
    for (auto& e : edges) {
        if (e.u == e.v)
            throw ValidationError("self-loop on node " + std::to_string(e.u));
        if (e.u >= n_ || e.v >= n_)
            throw ShapeError("edge endpoint " +
                             std::to_string(std::max(e.u, e.v)) +
                             " outside [0, " + std::to_string(n_) + ")");
        if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
    if (labels_) {
        if (labels_->size() != n_)
            throw ShapeError("label vector has " +
                             std::to_string(labels_->size()) +
                             " entries, expected " + std::to_string(n_));
        for (auto l : *labels_)
            if (l != 0 && l != 1)
                throw ValidationError("label value outside {0,1}");
    }
}

const std::vector<std::uint8_t>& AttributedGraph::labels() const {
    label_reads_->fetch_add(1, std::memory_order_relaxed);
    if (!labels_) throw ValidationError("graph has no labels");
    return *labels_;
}

AttributedGraph AttributedGraph::without_labels() const {
    return AttributedGraph(n_, edges_, attributes_, d_, std::nullopt);
}

std::vector<std::size_t> AttributedGraph::degrees() const {
    std::vector<std::size_t> deg(n_, 0);
    for (const auto& e : edges_) {
        ++deg[e.u];
        ++deg[e.v];
    }
    return deg;
}

bool AttributedGraph::has_edge(std::uint32_t u, std::uint32_t v) const {
    if (u == v) return false;
    if (u > v) std::swap(u, v);
    return std::binary_search(edges_.begin(), edges_.end(), Edge{u, v});
}

std::uint64_t AttributedGraph::content_hash() const {
    Fnv1a h;
    h.update_u64(n_);
    h.update_u64(d_);
    h.update_u64(edges_.size());
    for (const auto& e : edges_) {
        h.update_u64(e.u);
        h.update_u64(e.v);
    }
    for (double v : attributes_) h.update_double(v);
    return h.digest();
}

NormalizedAdjacency normalized_adjacency(const AttributedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<std::vector<std::uint32_t>> nbrs(n);
    for (const auto& e : g.edges()) {
        nbrs[e.u].push_back(e.v);
        nbrs[e.v].push_back(e.u);
    }
    std::vector<double> inv_sqrt(n);
    for (std::size_t i = 0; i < n; ++i) {
        nbrs[i].push_back(static_cast<std::uint32_t>(i));  // self loop of A+I
        std::sort(nbrs[i].begin(), nbrs[i].end());
        inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(nbrs[i].size()));
    }
    kernels::Csr m;
    m.rows = m.cols = n;
    m.row_ptr.resize(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i)
        m.row_ptr[i + 1] = m.row_ptr[i] + nbrs[i].size();
    m.col.reserve(m.row_ptr[n]);
    m.val.reserve(m.row_ptr[n]);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto j : nbrs[i]) {
            m.col.push_back(j);
            m.val.push_back(inv_sqrt[i] * inv_sqrt[j]);
        }
    }
    return NormalizedAdjacency{std::move(m)};
}

namespace {

bool is_integer_token(const std::string& t) {
    if (t.empty()) return false;
    for (char c : t)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

double parse_double(const std::string& s, std::size_t line_no,
                    const std::string& what) {
    double v;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError(what + ": line " + std::to_string(line_no) +
                         ": bad number '" + s + "'");
    return v;
}

}  // namespace

AttributedGraph load_graph(const std::string& edge_path,
                           const std::string& attribute_path,
                           const std::string& label_path,
                           const std::string& id_map_out_path) {
    // Attributes first: their row count defines n.
    std::ifstream attr_in(attribute_path);
    if (!attr_in) throw ParseError("cannot open " + attribute_path);
    std::vector<double> attrs;
    std::size_t d = 0, row_no = 0;
    std::string line;
    while (std::getline(attr_in, line)) {
        ++row_no;
        if (line.empty()) continue;
        std::size_t fields = 0, pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            std::size_t end = (comma == std::string::npos) ? line.size() : comma;
            attrs.push_back(parse_double(line.substr(pos, end - pos), row_no,
                                         attribute_path));
            ++fields;
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (d == 0)
            d = fields;
        else if (fields != d)
            throw ShapeError(attribute_path + ": line " +
                             std::to_string(row_no) + ": expected " +
                             std::to_string(d) + " fields, got " +
                             std::to_string(fields));
    }
    const std::size_t n = (d == 0) ? 0 : attrs.size() / d;
    if (n == 0) throw ShapeError(attribute_path + ": no attribute rows");

    std::ifstream edge_in(edge_path);
    if (!edge_in) throw ParseError("cannot open " + edge_path);
    std::vector<std::pair<std::string, std::string>> raw;
    bool all_integer = true;
    std::size_t line_no = 0;
    while (std::getline(edge_in, line)) {
        ++line_no;
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() != 2)
            throw ParseError(edge_path + ": line " + std::to_string(line_no) +
                             ": expected two node ids, got " +
                             std::to_string(toks.size()) + " tokens");
        all_integer = all_integer && is_integer_token(toks[0]) &&
                      is_integer_token(toks[1]);
        raw.emplace_back(std::move(toks[0]), std::move(toks[1]));
    }

    std::unordered_map<std::string, std::uint32_t> id_map;
    std::vector<std::string> external_order;
    auto map_id = [&](const std::string& tok) -> std::uint32_t {
        if (all_integer) {
            std::uint64_t v = 0;
            std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (v >= n)
                throw ShapeError(edge_path + ": node id " + tok +
                                 " outside [0, " + std::to_string(n) + ")");
            return static_cast<std::uint32_t>(v);
        }
        auto it = id_map.find(tok);
        if (it != id_map.end()) return it->second;
        if (id_map.size() >= n)
            throw ShapeError(edge_path + ": more than " + std::to_string(n) +
                             " distinct node ids");
        auto next = static_cast<std::uint32_t>(id_map.size());
        id_map.emplace(tok, next);
        external_order.push_back(tok);
        return next;
    };

    std::vector<Edge> edges;
    edges.reserve(raw.size());
    for (auto& [a, b] : raw) {
        std::uint32_t u = map_id(a), v = map_id(b);
        if (u == v)
            throw ValidationError(edge_path + ": self-loop '" + a + " " + b +
                                  "'");
        edges.push_back({u, v});
    }

    if (!id_map_out_path.empty()) {
        std::ofstream out(id_map_out_path);
        if (!out) throw ParseError("cannot write " + id_map_out_path);
        out << "external_id,internal_id\n";
        if (all_integer) {
            for (std::size_t i = 0; i < n; ++i) out << i << "," << i << "\n";
        } else {
            for (std::size_t i = 0; i < external_order.size(); ++i)
                out << external_order[i] << "," << i << "\n";
        }
    }

    std::optional<std::vector<std::uint8_t>> labels;
    if (!label_path.empty()) {
        std::ifstream lab_in(label_path);
        if (!lab_in) throw ParseError("cannot open " + label_path);
        std::vector<std::uint8_t> lv;
        std::size_t lno = 0;
        while (std::getline(lab_in, line)) {
            ++lno;
            auto toks = split_ws(line);
            if (toks.empty()) continue;
            if (toks.size() != 1 || (toks[0] != "0" && toks[0] != "1"))
                throw ValidationError(label_path + ": line " +
                                      std::to_string(lno) +
                                      ": label must be 0 or 1");
            lv.push_back(toks[0] == "1" ? 1 : 0);
        }
        labels = std::move(lv);
    }

    return AttributedGraph(n, std::move(edges), std::move(attrs), d,
                           std::move(labels));
}

void save_graph(const AttributedGraph& g, const std::string& edge_path,
                const std::string& attribute_path,
                const std::string& label_path) {
    {
        std::ofstream out(edge_path);
        if (!out) throw ParseError("cannot write " + edge_path);
        for (const auto& e : g.edges()) out << e.u << "\t" << e.v << "\n";
    }
    {
        std::ofstream out(attribute_path);
        if (!out) throw ParseError("cannot write " + attribute_path);
        const std::size_t d = g.attr_dim();
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            auto row = g.attr_row(i);
            for (std::size_t j = 0; j < d; ++j) {
                if (j) out << ",";
                out << format_double(row[j]);
            }
            out << "\n";
        }
    }
    if (!label_path.empty()) {
        std::ofstream out(label_path);
        if (!out) throw ParseError("cannot write " + label_path);
        for (auto l : g.labels()) out << int(l) << "\n";
    }
}

AttributedGraph generate_synthetic(const SyntheticParams& p) {
    if (p.communities < 1 || p.n < p.communities)
        throw ValidationError("need n >= communities >= 1");
    if (p.intra_p < 0 || p.intra_p > 1 || p.inter_p < 0 || p.inter_p > 1)
        throw ValidationError("edge probability outside [0,1]");
    if (p.inter_p > p.intra_p)
        throw ValidationError("inter_p must not exceed intra_p");
    if (p.d < 1) throw ValidationError("attribute dimension must be >= 1");

    Rng rng(p.seed);
    // Node i belongs to community i % communities is too regular; assign
    // contiguous blocks so intra edges are easy to reason about in tests.
    std::vector<std::size_t> community(p.n);
    for (std::size_t i = 0; i < p.n; ++i)
        community[i] = i * p.communities / p.n;

    std::vector<double> means(p.communities * p.d);
    for (auto& m : means) m = rng.normal(0.0, 3.0);

    std::vector<double> attrs(p.n * p.d);
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = 0; j < p.d; ++j)
            attrs[i * p.d + j] =
                means[community[i] * p.d + j] + rng.normal(0.0, 1.0);

    std::vector<Edge> edges;
    for (std::size_t i = 0; i < p.n; ++i) {
        for (std::size_t j = i + 1; j < p.n; ++j) {
            double prob =
                community[i] == community[j] ? p.intra_p : p.inter_p;
            if (prob > 0 && rng.bernoulli(prob))
                edges.push_back({static_cast<std::uint32_t>(i),
                                 static_cast<std::uint32_t>(j)});
        }
    }
    return AttributedGraph(p.n, std::move(edges), std::move(attrs), p.d);
}

}  // namespace gadsel
