#include "nuedge/cli/config.hpp"

#include <algorithm>
#include <sstream>

#include "nuedge/error.hpp"
#include "nuedge/text.hpp"

namespace nuedge::cli {

namespace {

const std::vector<std::string>& known_distances() {
    static const std::vector<std::string> names{"kolmogorov", "weighted_sup", "lp",        "w1",
                                                "wp_upper",   "wp_exact",     "moment_gap"};
    return names;
}

std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

std::size_t parse_size(std::string_view s) {
    const long long v = text::parse_int(s);
    if (v < 0) throw Error(ErrorKind::ParseError, "expected a nonnegative integer, got '" + std::string(s) + "'");
    return static_cast<std::size_t>(v);
}

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
    return out;
}

std::string join_words(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + v[i];
    return out;
}

}  // namespace

std::string to_string(NormalizationMode mode) {
    switch (mode) {
        case NormalizationMode::SelfNorm: return "selfnorm";
        case NormalizationMode::Stationary: return "stationary";
        case NormalizationMode::SqrtN: return "sqrt-n";
        case NormalizationMode::Custom: return "custom";
    }
    return "selfnorm";
}

NormalizationMode parse_normalization(const std::string& text_in) {
    if (text_in == "selfnorm") return NormalizationMode::SelfNorm;
    if (text_in == "stationary") return NormalizationMode::Stationary;
    if (text_in == "sqrt-n") return NormalizationMode::SqrtN;
    if (text_in == "custom") return NormalizationMode::Custom;
    throw Error(ErrorKind::ParseError, "unknown normalization '" + text_in + "'");
}

std::vector<std::size_t> geometric_sweep(std::size_t start, std::size_t stop, std::size_t ratio) {
    require(start >= 1 && ratio >= 2, "geometric sweep needs start >= 1 and ratio >= 2");
    std::vector<std::size_t> out;
    for (std::size_t n = start; n <= stop; n *= ratio) out.push_back(n);
    return out;
}

ExperimentConfig parse_config(const std::string& text_in) {
    ExperimentConfig c;
    for (const auto& kv : text::parse_key_values(text_in)) {
        const auto& k = kv.key;
        const auto& v = kv.value;
        if (k == "model") c.model = v;
        else if (k == "chain_file") c.chain_file = v;
        else if (k == "n") {
            c.n_values.clear();
            for (const auto& w : words(v)) c.n_values.push_back(parse_size(w));
        } else if (k == "n_geometric") {
            const auto w = words(v);
            if (w.size() != 3) throw Error(ErrorKind::ParseError, "n_geometric takes start stop ratio");
            c.n_values = geometric_sweep(parse_size(w[0]), parse_size(w[1]), parse_size(w[2]));
        } else if (k == "r") c.r = static_cast<int>(text::parse_int(v));
        else if (k == "s") c.s = text::parse_double(v);
        else if (k == "distances") c.distances = words(v);
        else if (k == "powers") c.powers = text::parse_doubles(v);
        else if (k == "moments") {
            c.moments.clear();
            for (const auto& w : words(v)) c.moments.push_back(static_cast<int>(text::parse_int(w)));
        } else if (k == "normalization") {
            const auto w = words(v);
            if (w.empty()) throw Error(ErrorKind::ParseError, "normalization needs a mode");
            c.normalization = parse_normalization(w[0]);
            if (c.normalization == NormalizationMode::Custom) {
                if (w.size() != 3) throw Error(ErrorKind::ParseError, "custom normalization takes A and B");
                c.custom_A = text::parse_double(w[1]);
                c.custom_B = text::parse_double(w[2]);
            } else if (w.size() != 1) {
                throw Error(ErrorKind::ParseError, "only custom normalization takes parameters");
            }
        } else if (k == "mc_count") c.mc_count = parse_size(v);
        else if (k == "seed") c.seed = std::stoull(v);
        else if (k == "window") c.window = text::parse_double(v);
        else if (k == "grid_nodes") c.grid_nodes = parse_size(v);
        else if (k == "inversion_tolerance") c.inversion_tolerance = text::parse_double(v);
        else if (k == "slope_margin") c.slope_margin = text::parse_double(v);
        else if (k == "out_dir") c.out_dir = v;
        else if (k == "table_file") c.table_file = v;
        else if (k == "summary_file") c.summary_file = v;
        else throw Error(ErrorKind::ParseError, "unknown config key '" + k + "' on line " + std::to_string(kv.line));
    }
    validate(c);
    return c;
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "model = " << c.model << '\n';
    if (!c.chain_file.empty()) out << "chain_file = " << c.chain_file << '\n';
    out << "n = " << join_sizes(c.n_values) << '\n';
    out << "r = " << c.r << '\n';
    out << "s = " << text::format_double(c.s) << '\n';
    out << "distances = " << join_words(c.distances) << '\n';
    out << "powers = " << text::join_doubles(c.powers) << '\n';
    out << "moments =";
    for (int m : c.moments) out << ' ' << m;
    out << '\n';
    out << "normalization = " << to_string(c.normalization);
    if (c.normalization == NormalizationMode::Custom)
        out << ' ' << text::format_double(c.custom_A) << ' ' << text::format_double(c.custom_B);
    out << '\n';
    out << "mc_count = " << c.mc_count << '\n';
    out << "seed = " << c.seed << '\n';
    out << "window = " << text::format_double(c.window) << '\n';
    out << "grid_nodes = " << c.grid_nodes << '\n';
    out << "inversion_tolerance = " << text::format_double(c.inversion_tolerance) << '\n';
    out << "slope_margin = " << text::format_double(c.slope_margin) << '\n';
    out << "out_dir = " << c.out_dir << '\n';
    out << "table_file = " << c.table_file << '\n';
    out << "summary_file = " << c.summary_file << '\n';
    return out.str();
}

ExperimentConfig load_config(const std::string& path) { return parse_config(text::read_file(path)); }

void validate(const ExperimentConfig& c) {
    require(c.r >= 0, "config: r must be >= 0");
    require(c.s >= 0.0, "config: s must be >= 0");
    for (std::size_t i = 0; i < c.n_values.size(); ++i) {
        require(c.n_values[i] >= 1, "config: n values must be positive");
        if (i > 0) require(c.n_values[i] > c.n_values[i - 1], "config: n-sweep must be strictly increasing");
    }
    for (const auto& d : c.distances)
        require(std::find(known_distances().begin(), known_distances().end(), d) != known_distances().end(),
                "config: unknown distance '" + d + "'");
    for (double p : c.powers) require(p >= 1.0, "config: powers must be >= 1");
    for (int m : c.moments) require(m >= 1, "config: moments must be >= 1");
    require(c.custom_B > 0.0, "config: custom B must be positive");
    require(c.window > 0.0, "config: window must be positive");
    require(c.grid_nodes >= 11, "config: grid_nodes must be at least 11");
    require(c.mc_count >= 2, "config: mc_count must be at least 2");
    require(c.inversion_tolerance > 0.0, "config: inversion_tolerance must be positive");
    require(!c.model.empty() || !c.chain_file.empty(), "config: a model or chain_file is required");
}

bool wants(const ExperimentConfig& c, const std::string& distance) {
    return std::find(c.distances.begin(), c.distances.end(), distance) != c.distances.end();
}

}  // namespace nuedge::cli
