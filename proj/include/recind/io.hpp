#pragma once

// File formats for the CLI: path files, flat key=value experiment configs,
// h-table and pmf files, plus deterministic number formatting and the
// SHA-256 digests recorded in run manifests.

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "recind/core.hpp"
#include "recind/distributions.hpp"
#include "recind/errors.hpp"
#include "recind/event_algebra.hpp"
#include "recind/joint_pmf.hpp"
#include "recind/rational.hpp"
#include "recind/simulator.hpp"

namespace recind {

// Shortest round-trip decimal form; identical across reruns.
inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

namespace detail {

inline std::string strip_comment_and_trim(std::string line) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = line.find_last_not_of(" \t\r\n");
    return line.substr(first, last - first + 1);
}

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, sep)) out.push_back(strip_comment_and_trim(token));
    if (!text.empty() && text.back() == sep) out.emplace_back();
    return out;
}

inline double parse_double(const std::string& token, int line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw InputError("line " + std::to_string(line_no) + ": expected a number, found '" + token + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& token, const std::string& what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
        throw InputError(what + " must be a non-negative integer, found '" + token + "'");
    }
    return v;
}

inline bool looks_decimal(const std::string& token) {
    return token.find('.') != std::string::npos || token.find('e') != std::string::npos ||
           token.find('E') != std::string::npos;
}

}  // namespace detail

// One observation per line, coordinates separated by commas, '#' comments.
inline Path parse_path_file(std::istream& in) {
    std::vector<Observation> observations;
    std::string raw;
    int line_no = 0;
    int dim = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::strip_comment_and_trim(raw);
        if (line.empty()) continue;
        const auto tokens = detail::split(line, ',');
        std::vector<double> coords;
        coords.reserve(tokens.size());
        for (const auto& token : tokens) {
            const double v = detail::parse_double(token, line_no);
            if (!std::isfinite(v)) {
                throw InputError("line " + std::to_string(line_no) + ": non-finite coordinate");
            }
            coords.push_back(v);
        }
        if (dim == 0) {
            dim = static_cast<int>(coords.size());
        } else if (static_cast<int>(coords.size()) != dim) {
            throw InputError("line " + std::to_string(line_no) + ": nonuniform dimension (expected " +
                             std::to_string(dim) + ", found " + std::to_string(coords.size()) + ")");
        }
        observations.emplace_back(std::move(coords));
    }
    if (observations.empty()) throw InputError("path file contains no observations");
    return Path(std::move(observations));
}

// A law parameter: a plain number, or linear(a,b) meaning a + b*(j-1).
inline ParamSchedule parse_param(const std::string& token) {
    if (token.starts_with("linear(") && token.ends_with(")")) {
        const auto inner = token.substr(7, token.size() - 8);
        const auto parts = detail::split(inner, ',');
        if (parts.size() != 2) throw InputError("linear(...) takes two parameters, found '" + token + "'");
        return {detail::parse_double(parts[0], 0), detail::parse_double(parts[1], 0)};
    }
    return {detail::parse_double(token, 0), 0.0};
}

// "<family> <params...>": uniform a b | gaussian mean sd | exponential rate.
inline LawSpec parse_law(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> tokens;
    std::string token;
    while (in >> token) tokens.push_back(token);
    if (tokens.empty()) throw InputError("empty distribution law");
    LawSpec law;
    std::size_t want = 2;
    if (tokens[0] == "uniform") {
        law.family = Family::Uniform;
    } else if (tokens[0] == "gaussian") {
        law.family = Family::Gaussian;
    } else if (tokens[0] == "exponential") {
        law.family = Family::Exponential;
        want = 1;
    } else {
        throw InputError("unknown distribution family '" + tokens[0] + "'");
    }
    if (tokens.size() != want + 1) {
        throw InputError("law '" + text + "' needs " + std::to_string(want) + " parameter(s)");
    }
    law.p1 = parse_param(tokens[1]);
    law.p2 = want == 2 ? parse_param(tokens[2]) : ParamSchedule{0.0, 0.0};
    return law;
}

struct ParsedConfig {
    ExperimentConfig cfg;
    std::string mode_string = "both";
    std::vector<std::pair<std::string, std::string>> spec_entries;  // normalized spec.* lines
};

// Flat key=value text with dotted keys. Recognized keys: n, d, mode,
// replicates, seed, and the spec.* family (spec.default, spec.j<k>,
// spec.coord<i>, spec.j<k>.coord<i>).
inline ParsedConfig parse_config_file(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::strip_comment_and_trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InputError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = detail::strip_comment_and_trim(line.substr(0, eq));
        const std::string value = detail::strip_comment_and_trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw InputError("line " + std::to_string(line_no) + ": expected key = value");
        }
        entries.emplace_back(key, value);
    }

    int n = 0;
    int d = 1;
    for (const auto& [key, value] : entries) {
        if (key == "n") n = static_cast<int>(detail::parse_u64(value, "n"));
        if (key == "d") d = static_cast<int>(detail::parse_u64(value, "d"));
    }
    if (n < 1) throw InputError("config must set n >= 1");
    if (d < 1) throw InputError("config must set d >= 1");

    ParsedConfig out{ExperimentConfig(n, d), "both", {}};
    for (const auto& [key, value] : entries) {
        if (key == "n" || key == "d") continue;
        if (key == "mode") {
            out.mode_string = value;
            if (value == "chain") {
                out.cfg.run_chain = true;
                out.cfg.run_dominance = false;
            } else if (value == "dominance") {
                out.cfg.run_chain = false;
                out.cfg.run_dominance = true;
            } else if (value == "both") {
                out.cfg.run_chain = out.cfg.run_dominance = true;
            } else {
                throw InputError("mode must be chain, dominance, or both; found '" + value + "'");
            }
        } else if (key == "replicates") {
            out.cfg.replicates = detail::parse_u64(value, "replicates");
        } else if (key == "seed") {
            out.cfg.seed = detail::parse_u64(value, "seed");
        } else if (key.starts_with("spec.")) {
            const LawSpec law = parse_law(value);
            const std::string target = key.substr(5);
            if (target == "default") {
                out.cfg.spec.set_default(law);
            } else {
                int j = 0;
                int i = 0;
                const auto dot = target.find('.');
                const std::string head = dot == std::string::npos ? target : target.substr(0, dot);
                const std::string tail = dot == std::string::npos ? "" : target.substr(dot + 1);
                if (head.starts_with("j")) {
                    j = static_cast<int>(detail::parse_u64(head.substr(1), "spec index"));
                } else if (head.starts_with("coord") && tail.empty()) {
                    i = static_cast<int>(detail::parse_u64(head.substr(5), "spec coordinate"));
                } else {
                    throw InputError("unknown spec key '" + key + "'");
                }
                if (!tail.empty()) {
                    if (!tail.starts_with("coord")) throw InputError("unknown spec key '" + key + "'");
                    i = static_cast<int>(detail::parse_u64(tail.substr(5), "spec coordinate"));
                }
                if (j > 0 && i > 0) {
                    out.cfg.spec.set(j, i, law);
                } else if (j > 0) {
                    out.cfg.spec.set_for_index(j, law);
                } else {
                    out.cfg.spec.set_for_coord(i, law);
                }
            }
            out.spec_entries.emplace_back(key, value);
        } else {
            throw InputError("unknown config key '" + key + "'");
        }
    }
    if (out.spec_entries.empty()) {
        out.spec_entries.emplace_back("spec.default", "uniform 0 1");
    }
    return out;
}

struct ParsedHTable {
    int n = 1;
    bool exact = true;  // every value integral or num/den
    HTable<Rational> rational;
    HTable<double> dbl;
};

// Lines "j,h0,h1" for j = 2..n (each exactly once, any order).
inline ParsedHTable parse_htable_file(std::istream& in) {
    struct Row {
        int j;
        std::string h0, h1;
    };
    std::vector<Row> rows;
    std::string raw;
    int line_no = 0;
    bool exact = true;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::strip_comment_and_trim(raw);
        if (line.empty()) continue;
        const auto tokens = detail::split(line, ',');
        if (tokens.size() != 3) {
            throw InputError("line " + std::to_string(line_no) + ": expected j,h0,h1");
        }
        const int j = static_cast<int>(detail::parse_u64(tokens[0], "h-table index"));
        if (j < 2) throw InputError("line " + std::to_string(line_no) + ": h-table index must be >= 2");
        exact = exact && !detail::looks_decimal(tokens[1]) && !detail::looks_decimal(tokens[2]);
        rows.push_back({j, tokens[1], tokens[2]});
    }

    ParsedHTable out;
    out.exact = exact;
    out.n = 1;
    for (const auto& row : rows) out.n = std::max(out.n, row.j);
    std::vector<bool> seen(static_cast<std::size_t>(out.n) + 1, false);
    out.rational.n = out.dbl.n = out.n;
    out.rational.values.assign(static_cast<std::size_t>(out.n - 1), {Rational(0), Rational(0)});
    out.dbl.values.assign(static_cast<std::size_t>(out.n - 1), {0.0, 0.0});
    auto value_of = [](const std::string& token) {
        return detail::looks_decimal(token) ? Rational(0) : parse_fraction(token);
    };
    for (const auto& row : rows) {
        if (seen[static_cast<std::size_t>(row.j)]) {
            throw InputError("duplicate h-table row for j = " + std::to_string(row.j));
        }
        seen[static_cast<std::size_t>(row.j)] = true;
        const auto slot = static_cast<std::size_t>(row.j - 2);
        if (exact) {
            out.rational.values[slot] = {value_of(row.h0), value_of(row.h1)};
            out.dbl.values[slot] = {to_double(out.rational.values[slot][0]),
                                    to_double(out.rational.values[slot][1])};
        } else {
            auto as_double = [](const std::string& token) {
                return token.find('/') != std::string::npos ? to_double(parse_fraction(token))
                                                            : detail::parse_double(token, 0);
            };
            out.dbl.values[slot] = {as_double(row.h0), as_double(row.h1)};
        }
    }
    for (int j = 2; j <= out.n; ++j) {
        if (!seen[static_cast<std::size_t>(j)]) {
            throw InputError("h-table is missing a row for j = " + std::to_string(j));
        }
    }
    return out;
}

struct ParsedPmf {
    int n = 1;
    bool exact = true;
    JointPmf<Rational> rational;
    JointPmf<double> dbl;
};

// JSON with "n" and a mask-indexed "probs" array whose entries are "num/den"
// strings or plain numbers. Output of `recind exact` is accepted directly:
// when a top-level "modes" object is present, the chain table is used,
// falling back to dominance.
inline ParsedPmf parse_pmf_json(std::istream& in) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("cannot parse pmf JSON: ") + e.what());
    }
    const nlohmann::json* table = &doc;
    if (!doc.contains("probs") && doc.contains("modes")) {
        const auto& modes = doc.at("modes");
        if (modes.contains("chain")) {
            table = &modes.at("chain");
        } else if (modes.is_object() && !modes.empty()) {
            table = &modes.begin().value();
        } else {
            throw InputError("pmf JSON 'modes' object is empty");
        }
    }
    if (!doc.contains("n") || !table->contains("probs")) {
        throw InputError("pmf JSON needs fields 'n' and 'probs'");
    }
    ParsedPmf out;
    out.n = doc.at("n").get<int>();
    const auto& probs = table->at("probs");
    if (!probs.is_array() || probs.size() != outcome_count(out.n)) {
        throw InputError("pmf JSON needs a probs array of length 2^(n-1)");
    }
    out.rational.n = out.dbl.n = out.n;
    for (const auto& entry : probs) {
        if (entry.is_string()) {
            out.rational.probs.push_back(parse_fraction(entry.get<std::string>()));
        } else if (entry.is_number()) {
            out.exact = false;
            out.dbl.probs.push_back(entry.get<double>());
        } else {
            throw InputError("pmf entries must be 'num/den' strings or numbers");
        }
    }
    if (out.exact) {
        for (const Rational& q : out.rational.probs) out.dbl.probs.push_back(to_double(q));
    } else if (out.dbl.probs.size() != probs.size()) {
        throw InputError("pmf entries must be all exact or all numeric");
    }
    return out;
}

namespace detail {

// SHA-256, FIPS 180-4.
class Sha256 {
public:
    void update(std::string_view data) {
        for (const char c : data) {
            block_[fill_++] = static_cast<std::uint8_t>(c);
            ++total_;
            if (fill_ == 64) {
                compress();
                fill_ = 0;
            }
        }
    }

    std::string hex_digest() {
        const std::uint64_t bits = total_ * 8;
        update(std::string_view("\x80", 1));
        while (fill_ != 56) update(std::string_view("\0", 1));
        for (int i = 7; i >= 0; --i) {
            const char byte = static_cast<char>(bits >> (8 * i) & 0xFF);
            update(std::string_view(&byte, 1));
        }
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        out.reserve(64);
        for (const std::uint32_t word : state_) {
            for (int shift = 28; shift >= 0; shift -= 4) out.push_back(digits[word >> shift & 0xF]);
        }
        return out;
    }

private:
    static std::uint32_t rotr(std::uint32_t x, int s) { return x >> s | x << (32 - s); }

    void compress() {
        static constexpr std::uint32_t k[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
            0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
            0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
            0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
            0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
            0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
            0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
            0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
            0xc67178f2};
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i) {
            w[i] = static_cast<std::uint32_t>(block_[4 * i]) << 24 |
                   static_cast<std::uint32_t>(block_[4 * i + 1]) << 16 |
                   static_cast<std::uint32_t>(block_[4 * i + 2]) << 8 |
                   static_cast<std::uint32_t>(block_[4 * i + 3]);
        }
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        auto [a, b, c, d, e, f, g, h] = state_;
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = h + s1 + ch + k[i] + w[i];
            const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = s0 + maj;
            h = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        state_[0] += a;
        state_[1] += b;
        state_[2] += c;
        state_[3] += d;
        state_[4] += e;
        state_[5] += f;
        state_[6] += g;
        state_[7] += h;
    }

    std::array<std::uint32_t, 8> state_ = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                                           0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::array<std::uint8_t, 64> block_{};
    std::size_t fill_ = 0;
    std::uint64_t total_ = 0;
};

}  // namespace detail

inline std::string sha256_hex(std::string_view data) {
    detail::Sha256 h;
    h.update(data);
    return h.hex_digest();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw InputError("failed to write '" + path + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace recind
