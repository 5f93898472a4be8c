// Copyright 2026 The kloshadows Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * @file io.hpp
 * Text and binary file formats. Binary formats are little-endian with a
 * four-byte magic and a u16 version.
 *
 *   dataset  "ICSD" u16 version=1, u16 n, u16 d, u64 S, u64 seed,
 *            then S*n outcome bytes, shot-major (26-byte header)
 *   duals    "ICDF" u16 version=1, u16 n, u32 groups, then per group:
 *            u16 size, u16 qubit[size], u32 outcomes, u32 dim,
 *            u16 provenance length, provenance bytes,
 *            outcomes*dim*dim complex entries (f64 re, f64 im), row-major
 *   states   "ICRD" u16 version=1, u16 n, u32 groups, then per group:
 *            u16 size, u16 qubit[size], u32 dim, dim*dim complex entries
 */

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "kloshadows/duals.hpp"
#include "kloshadows/partition.hpp"
#include "kloshadows/pauli.hpp"
#include "kloshadows/sampling.hpp"
#include "kloshadows/states.hpp"

namespace kloshadows {

inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kDatasetHeaderBytes = 26;

// ---------------------------------------------------------------- text

/**
 * Hamiltonian text: '#' starts a comment, blank lines are ignored and every
 * other line is "<coefficient> <word over IXYZ>".
 */
inline PauliObservable read_hamiltonian(std::istream &in, const std::string &source = "<stream>") {
    std::vector<PauliTerm> terms;
    std::size_t width = 0;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string coef_text, word, extra;
        if (!(ls >> coef_text)) continue;
        const auto fail = [&](const std::string &msg) {
            return ParseError(source + ":" + std::to_string(lineno) + ": " + msg);
        };
        if (!(ls >> word)) throw fail("expected '<coefficient> <Pauli word>'");
        if (ls >> extra) throw fail("unexpected trailing token '" + extra + "'");
        double coef = 0.0;
        try {
            std::size_t used = 0;
            coef = std::stod(coef_text, &used);
            if (used != coef_text.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception &) {
            throw fail("invalid coefficient '" + coef_text + "'");
        }
        if (!std::isfinite(coef)) throw fail("non-finite coefficient");
        if (word.find_first_not_of("IXYZ") != std::string::npos) {
            throw fail("Pauli word '" + word + "' has letters outside IXYZ");
        }
        if (width == 0) width = word.size();
        if (word.size() != width) {
            throw fail("word length " + std::to_string(word.size()) + " differs from " + std::to_string(width));
        }
        terms.push_back({coef, word});
    }
    if (terms.empty()) throw ParseError(source + ": no terms");
    return PauliObservable(static_cast<int>(width), terms);
}

inline PauliObservable read_hamiltonian(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_hamiltonian(in, path.string());
}

inline void write_hamiltonian(std::ostream &out, const PauliObservable &obs) {
    out << std::setprecision(17);
    for (const auto &t : obs.terms()) out << t.coefficient << ' ' << t.word << '\n';
}

/** One group per line, qubit indices separated by spaces or commas; '#' comments. */
inline Partition read_partition(std::istream &in, const std::string &source = "<stream>") {
    std::vector<QubitList> groups;
    std::string line;
    int lineno = 0;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        for (char &c : line) {
            if (c == ',' || c == '(' || c == ')') c = ' ';
        }
        std::istringstream ls(line);
        QubitList group;
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                const int q = std::stoi(tok, &used);
                if (used != tok.size()) throw std::invalid_argument("trailing");
                group.push_back(q);
            } catch (const std::exception &) {
                throw ParseError(source + ":" + std::to_string(lineno) + ": invalid qubit index '" + tok + "'");
            }
        }
        if (group.empty()) continue;
        count += group.size();
        groups.push_back(std::move(group));
    }
    if (groups.empty()) throw ParseError(source + ": no groups");
    try {
        return Partition(static_cast<int>(count), std::move(groups));
    } catch (const Error &e) {
        throw ParseError(source + ": " + e.what());
    }
}

inline void write_partition(std::ostream &out, const Partition &p) {
    for (const auto &g : p.groups()) {
        for (std::size_t j = 0; j < g.size(); ++j) out << (j ? " " : "") << g[j];
        out << '\n';
    }
}

// ---------------------------------------------------------------- binary

namespace detail {

class ByteWriter {
   public:
    explicit ByteWriter(std::ostream &out) : out_(out) {}

    template <class T>
    void uint(T value) {
        char buf[sizeof(T)];
        for (std::size_t b = 0; b < sizeof(T); ++b) buf[b] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * b)) & 0xFF);
        out_.write(buf, sizeof(T));
    }
    void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
    void bytes(const void *data, std::size_t n) { out_.write(static_cast<const char *>(data), static_cast<std::streamsize>(n)); }
    void magic(const char *m) { out_.write(m, 4); }
    void matrix(const Matrix &m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                f64(m(i, j).real());
                f64(m(i, j).imag());
            }
        }
    }
    void group(const QubitList &g) {
        uint<std::uint16_t>(static_cast<std::uint16_t>(g.size()));
        for (int q : g) uint<std::uint16_t>(static_cast<std::uint16_t>(q));
    }

   private:
    std::ostream &out_;
};

class ByteReader {
   public:
    ByteReader(std::istream &in, std::string source) : in_(in), source_(std::move(source)) {}

    template <class T>
    T uint() {
        unsigned char buf[sizeof(T)];
        read(buf, sizeof(T));
        std::uint64_t v = 0;
        for (std::size_t b = 0; b < sizeof(T); ++b) v |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
        return static_cast<T>(v);
    }
    double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
    void read(void *data, std::size_t n) {
        in_.read(static_cast<char *>(data), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) throw ParseError(source_ + ": truncated file");
    }
    void expect_magic(const char *m) {
        char buf[4];
        read(buf, 4);
        if (std::memcmp(buf, m, 4) != 0) throw ParseError(source_ + ": bad magic, expected " + std::string(m, 4));
        const auto version = uint<std::uint16_t>();
        if (version != kFormatVersion) throw ParseError(source_ + ": unsupported version " + std::to_string(version));
    }
    Matrix matrix(Eigen::Index dim) {
        Matrix m(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                const double re = f64();
                const double im = f64();
                m(i, j) = Complex(re, im);
            }
        }
        return m;
    }
    QubitList group() {
        const auto size = uint<std::uint16_t>();
        QubitList g(size);
        for (auto &q : g) q = uint<std::uint16_t>();
        return g;
    }
    void expect_end() {
        if (in_.peek() != std::char_traits<char>::eof()) throw ParseError(source_ + ": trailing bytes");
    }
    const std::string &source() const { return source_; }

   private:
    std::istream &in_;
    std::string source_;
};

inline std::ofstream open_out(const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path.string());
    return out;
}

inline std::ifstream open_in(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    return in;
}

}  // namespace detail

/** The POVM id is not stored; six outcomes per qubit read back as "pauli6". */
inline std::string povm_id_for_outcomes(int d) { return d == 6 ? "pauli6" : "d" + std::to_string(d); }

inline void write_dataset(std::ostream &out, const Dataset &ds) {
    detail::ByteWriter w(out);
    w.magic("ICSD");
    w.uint<std::uint16_t>(kFormatVersion);
    w.uint<std::uint16_t>(static_cast<std::uint16_t>(ds.qubits()));
    w.uint<std::uint16_t>(static_cast<std::uint16_t>(ds.outcomes_per_qubit()));
    w.uint<std::uint64_t>(ds.shots());
    w.uint<std::uint64_t>(ds.seed());
    w.bytes(ds.records().data(), ds.records().size());
}

inline Dataset read_dataset(std::istream &in, const std::string &source = "<stream>") {
    detail::ByteReader r(in, source);
    r.expect_magic("ICSD");
    const int n = r.uint<std::uint16_t>();
    const int d = r.uint<std::uint16_t>();
    const auto shots = r.uint<std::uint64_t>();
    const auto seed = r.uint<std::uint64_t>();
    if (n < 1 || d < 1 || d > 255) throw ParseError(source + ": invalid header");
    if (shots > std::numeric_limits<std::size_t>::max() / static_cast<std::uint64_t>(n)) {
        throw ParseError(source + ": shot count too large");
    }
    std::vector<std::uint8_t> records(static_cast<std::size_t>(shots) * static_cast<std::size_t>(n));
    r.read(records.data(), records.size());
    r.expect_end();
    try {
        return Dataset(n, d, seed, povm_id_for_outcomes(d), std::move(records));
    } catch (const Error &e) {
        throw ParseError(source + ": " + e.what());
    }
}

inline void write_duals(std::ostream &out, const GlobalDuals &duals) {
    detail::ByteWriter w(out);
    w.magic("ICDF");
    w.uint<std::uint16_t>(kFormatVersion);
    w.uint<std::uint16_t>(static_cast<std::uint16_t>(duals.qubits()));
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(duals.frames().size()));
    for (const auto &f : duals.frames()) {
        w.group(f.group());
        w.uint<std::uint32_t>(static_cast<std::uint32_t>(f.size()));
        w.uint<std::uint32_t>(static_cast<std::uint32_t>(f.dual(0).rows()));
        w.uint<std::uint16_t>(static_cast<std::uint16_t>(f.provenance().size()));
        w.bytes(f.provenance().data(), f.provenance().size());
        for (const auto &d : f.duals()) w.matrix(d);
    }
}

inline GlobalDuals read_duals(std::istream &in, const std::string &source = "<stream>") {
    detail::ByteReader r(in, source);
    r.expect_magic("ICDF");
    const int n = r.uint<std::uint16_t>();
    const auto count = r.uint<std::uint32_t>();
    std::vector<QubitList> groups;
    std::vector<DualFrame> frames;
    try {
        for (std::uint32_t g = 0; g < count; ++g) {
            QubitList group = r.group();
            const auto outcomes = r.uint<std::uint32_t>();
            const auto dim = r.uint<std::uint32_t>();
            if (group.empty() || group.size() > 16 || dim != (1U << group.size()) || outcomes == 0 || outcomes > (1U << 24)) {
                throw ParseError(source + ": invalid group header");
            }
            std::string provenance(r.uint<std::uint16_t>(), '\0');
            r.read(provenance.data(), provenance.size());
            std::vector<Matrix> duals;
            for (std::uint32_t m = 0; m < outcomes; ++m) duals.push_back(r.matrix(dim));
            groups.push_back(group);
            frames.emplace_back(std::move(group), std::move(duals), std::move(provenance));
        }
        r.expect_end();
        return GlobalDuals(Partition(n, groups), std::move(frames));
    } catch (const ParseError &) {
        throw;
    } catch (const Error &e) {
        throw ParseError(source + ": " + e.what());
    }
}

inline void write_states(std::ostream &out, const Partition &partition, const std::vector<DensityMatrix> &states) {
    if (states.size() != partition.size()) throw DimensionError("write_states: one state per group is required");
    detail::ByteWriter w(out);
    w.magic("ICRD");
    w.uint<std::uint16_t>(kFormatVersion);
    w.uint<std::uint16_t>(static_cast<std::uint16_t>(partition.qubits()));
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(states.size()));
    for (std::size_t g = 0; g < states.size(); ++g) {
        w.group(partition.groups()[g]);
        w.uint<std::uint32_t>(static_cast<std::uint32_t>(states[g].matrix().rows()));
        w.matrix(states[g].matrix());
    }
}

inline BlockProductState read_states(std::istream &in, const std::string &source = "<stream>") {
    detail::ByteReader r(in, source);
    r.expect_magic("ICRD");
    const int n = r.uint<std::uint16_t>();
    const auto count = r.uint<std::uint32_t>();
    std::vector<QubitList> groups;
    std::vector<DensityMatrix> states;
    try {
        for (std::uint32_t g = 0; g < count; ++g) {
            QubitList group = r.group();
            const auto dim = r.uint<std::uint32_t>();
            if (group.empty() || group.size() > 12 || dim != (1U << group.size())) {
                throw ParseError(source + ": invalid group header");
            }
            states.emplace_back(r.matrix(dim));
            groups.push_back(std::move(group));
        }
        r.expect_end();
        return BlockProductState(Partition(n, groups), std::move(states));
    } catch (const ParseError &) {
        throw;
    } catch (const Error &e) {
        throw ParseError(source + ": " + e.what());
    }
}

template <class T, class Writer>
void write_file(const std::filesystem::path &path, const T &value, Writer writer) {
    auto out = detail::open_out(path);
    writer(out, value);
    if (!out) throw ParseError("failed writing " + path.string());
}

inline void save_dataset(const std::filesystem::path &path, const Dataset &ds) {
    write_file(path, ds, [](std::ostream &o, const Dataset &v) { write_dataset(o, v); });
}
inline Dataset load_dataset(const std::filesystem::path &path) {
    auto in = detail::open_in(path);
    return read_dataset(in, path.string());
}
inline void save_duals(const std::filesystem::path &path, const GlobalDuals &duals) {
    write_file(path, duals, [](std::ostream &o, const GlobalDuals &v) { write_duals(o, v); });
}
inline GlobalDuals load_duals(const std::filesystem::path &path) {
    auto in = detail::open_in(path);
    return read_duals(in, path.string());
}
inline void save_states(const std::filesystem::path &path, const Partition &p, const std::vector<DensityMatrix> &s) {
    auto out = detail::open_out(path);
    write_states(out, p, s);
}
inline BlockProductState load_states(const std::filesystem::path &path) {
    auto in = detail::open_in(path);
    return read_states(in, path.string());
}
inline Partition load_partition(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_partition(in, path.string());
}
inline void save_partition(const std::filesystem::path &path, const Partition &p) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    write_partition(out, p);
}

// ---------------------------------------------------------------- config

/** 64-bit FNV-1a. */
inline std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

struct RunConfig {
    std::uint64_t seed = 1;
    std::uint64_t shots = 1000000;
    int k = 4;
    std::string partitioner = "greedy";
    std::string backend = "lad";
    /** Negative selects the default d^k. */
    double s_bias = -1.0;
    double floor = kDefaultProbabilityFloor;
    int statevector_qubits = DenseLimits{}.statevector_qubits;
    int density_qubits = DenseLimits{}.density_qubits;
    std::string identity_mode = "include";

    double effective_s_bias(int d = 6) const {
        if (s_bias >= 0.0) return s_bias;
        double v = 1.0;
        for (int j = 0; j < k; ++j) v *= d;
        return v;
    }

    /** Canonical key=value text; equal configs give equal strings. */
    std::string canonical() const {
        std::ostringstream os;
        os << std::setprecision(17) << "seed=" << seed << ";shots=" << shots << ";k=" << k
           << ";partitioner=" << partitioner << ";backend=" << backend << ";s_bias=" << effective_s_bias()
           << ";floor=" << floor << ";sv_cap=" << statevector_qubits << ";dm_cap=" << density_qubits
           << ";identity=" << identity_mode;
        return os.str();
    }

    std::string hash() const { return hex64(fnv1a(canonical())); }
};

/** Minimal CSV writer; every field is written verbatim unless it needs quoting. */
class CsvWriter {
   public:
    explicit CsvWriter(std::ostream &out) : out_(out) { out_ << std::setprecision(12); }

    template <class... Fields>
    void row(const Fields &...fields) {
        bool first = true;
        ((write_field(fields, first)), ...);
        out_ << '\n';
    }

   private:
    template <class T>
    void write_field(const T &value, bool &first) {
        if (!first) out_ << ',';
        first = false;
        if constexpr (std::is_convertible_v<T, std::string_view>) {
            const std::string_view s(value);
            if (s.find_first_of(",\"\n") != std::string_view::npos) {
                out_ << '"';
                for (char c : s) out_ << (c == '"' ? "\"\"" : std::string(1, c));
                out_ << '"';
            } else {
                out_ << s;
            }
        } else {
            out_ << value;
        }
    }

    std::ostream &out_;
};

}  // namespace kloshadows
