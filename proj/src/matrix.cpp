#include "latsnf/matrix.hpp"

#include <fstream>
#include <istream>
#include <sstream>

namespace latsnf {

Rat parse_rat(const std::string& s) {
    if (s.empty()) throw ContractError("empty rational literal");
    auto slash = s.find('/');
    auto dot = s.find('.');
    try {
        if (slash != std::string::npos) {
            Int num(s.substr(0, slash));
            Int den(s.substr(slash + 1));
            if (den == 0) throw ContractError("zero denominator in '" + s + "'");
            Rat r(num, den);
            r.canonicalize();
            return r;
        }
        if (dot != std::string::npos) {
            // Exact decimal: sign, optional integer part, fractional digits.
            std::string head = s.substr(0, dot);
            std::string frac = s.substr(dot + 1);
            bool neg = !head.empty() && head[0] == '-';
            if (!head.empty() && (head[0] == '-' || head[0] == '+'))
                head = head.substr(1);
            if (head.empty()) head = "0";
            if (frac.empty() ||
                frac.find_first_not_of("0123456789") != std::string::npos)
                throw ContractError("bad rational literal '" + s + "'");
            Int den = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
            Rat r = Rat(Int(head)) + Rat(Int(frac), den);
            r.canonicalize();
            return neg ? Rat(-r) : r;
        }
        return Rat(Int(s));
    } catch (const std::invalid_argument&) {
        throw ContractError("bad rational literal '" + s + "'");
    }
}

std::string rat_to_string(const Rat& x) {
    Rat c = x;
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

RatMatrix to_rat(const IntMatrix& a) {
    RatMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = Rat(a(i, j));
    return r;
}

IntMatrix to_int(const RatMatrix& a) {
    IntMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (a(i, j).get_den() != 1)
                throw ContractError("matrix entry not integral");
            r(i, j) = a(i, j).get_num();
        }
    return r;
}

namespace {

template <typename T, typename Render>
std::string write_any(const Matrix<T>& a, Render render) {
    std::ostringstream out;
    out << a.rows() << ' ' << a.cols() << '\n';
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j) out << ' ';
            out << render(a(i, j));
        }
        out << '\n';
    }
    return out.str();
}

// Shared reader: validates the header and per-row entry counts, reporting
// 1-based line numbers on failure.
template <typename T, typename Parse>
Matrix<T> read_any(std::istream& in, Parse parse) {
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "missing header line");
    ++lineno;
    std::istringstream head(line);
    long rows = -1, cols = -1;
    if (!(head >> rows >> cols) || rows < 0 || cols < 0)
        throw ParseError(lineno, "header must be 'rows cols'");
    std::string extra;
    if (head >> extra) throw ParseError(lineno, "trailing tokens in header");
    Matrix<T> m{std::size_t(rows), std::size_t(cols)};
    for (long i = 0; i < rows; ++i) {
        if (!std::getline(in, line))
            throw ParseError(lineno + 1, "expected matrix row");
        ++lineno;
        std::istringstream row(line);
        std::string tok;
        for (long j = 0; j < cols; ++j) {
            if (!(row >> tok))
                throw ParseError(lineno, "expected " + std::to_string(cols) +
                                             " entries");
            try {
                m(std::size_t(i), std::size_t(j)) = parse(tok);
            } catch (const Error& e) {
                throw ParseError(lineno, e.what());
            }
        }
        if (row >> tok) throw ParseError(lineno, "trailing tokens in row");
    }
    return m;
}

Int parse_int_token(const std::string& tok) {
    try {
        return Int(tok);
    } catch (const std::invalid_argument&) {
        throw ContractError("bad integer literal '" + tok + "'");
    }
}

template <typename ReadFn>
auto read_file(const std::string& path, ReadFn fn) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open '" + path + "'");
    return fn(in);
}

}  // namespace

std::string write_matrix(const IntMatrix& a) {
    return write_any(a, [](const Int& x) { return x.get_str(); });
}

std::string write_matrix(const RatMatrix& a) {
    return write_any(a, rat_to_string);
}

IntMatrix read_int_matrix(std::istream& in) {
    return read_any<Int>(in, parse_int_token);
}

RatMatrix read_rat_matrix(std::istream& in) {
    return read_any<Rat>(in, parse_rat);
}

IntMatrix read_int_matrix_file(const std::string& path) {
    return read_file(path, [](std::istream& in) { return read_int_matrix(in); });
}

RatMatrix read_rat_matrix_file(const std::string& path) {
    return read_file(path, [](std::istream& in) { return read_rat_matrix(in); });
}

std::string write_vector(const IntVec& v) {
    IntMatrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return write_matrix(m);
}

IntVec read_int_vector_file(const std::string& path) {
    IntMatrix m = read_int_matrix_file(path);
    if (m.cols() != 1)
        throw ContractError("expected a column vector (cols = 1)");
    IntVec v(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, 0);
    return v;
}

}  // namespace latsnf
