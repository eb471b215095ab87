#include "odegeom/lie.hpp"
#include "odegeom/parse.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>

namespace odegeom {

// ---- QSqrt3 ----

int QSqrt3::sign() const {
    const int sa = a_ > 0 ? 1 : a_ < 0 ? -1 : 0;
    const int sb = b_ > 0 ? 1 : b_ < 0 ? -1 : 0;
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    // opposite signs: compare a^2 with 3 b^2
    Rational lhs = a_ * a_, rhs = 3 * b_ * b_;
    return lhs > rhs ? sa : sb;
}

QSqrt3 QSqrt3::inverse() const {
    Rational norm = a_ * a_ - 3 * b_ * b_;
    if (norm == 0) throw std::domain_error("division by zero in Q(sqrt 3)");
    return {a_ / norm, -b_ / norm};
}

Expr QSqrt3::to_expr() const {
    Expr out(a_);
    if (b_ != 0) out = out + Expr(b_) * sqrt(Expr(3));
    return out;
}

std::string QSqrt3::str() const {
    if (b_ == 0) return a_.str();
    std::string s;
    if (a_ != 0) s = a_.str();
    if (b_ == 1)
        s += a_ != 0 ? "+sqrt(3)" : "sqrt(3)";
    else if (b_ == -1)
        s += "-sqrt(3)";
    else {
        if (b_ > 0 && a_ != 0) s += "+";
        s += b_.str() + "*sqrt(3)";
    }
    return s;
}

double QSqrt3::approx() const {
    return a_.convert_to<double>() + b_.convert_to<double>() * std::sqrt(3.0);
}

namespace {

std::optional<Rational> rational_sqrt(const Rational& r) {
    if (r < 0) return std::nullopt;
    Integer n = numerator(r), d = denominator(r);
    Integer sn = boost::multiprecision::sqrt(n), sd = boost::multiprecision::sqrt(d);
    if (sn * sn != n || sd * sd != d) return std::nullopt;
    return Rational(sn, sd);
}

QSqrt3 sqrt_of(const QSqrt3& x) {
    if (x.sqrt3_part() != 0) throw std::invalid_argument("nested radical outside Q(sqrt 3)");
    const Rational& r = x.rational_part();
    if (auto s = rational_sqrt(r)) return {*s, 0};
    if (auto s = rational_sqrt(r / 3)) return {0, *s};
    throw std::invalid_argument("square root outside Q(sqrt 3): " + r.str());
}

QSqrt3 int_power(QSqrt3 b, Integer e) {
    if (e < 0) {
        b = b.inverse();
        e = -e;
    }
    QSqrt3 out(1);
    while (e > 0) {
        if (e % 2 == 1) out *= b;
        b *= b;
        e /= 2;
    }
    return out;
}

}  // namespace

QSqrt3 to_qsqrt3(const Expr& e) {
    switch (e.kind()) {
        case Kind::Number: return {e.value(), 0};
        case Kind::Add: {
            QSqrt3 s;
            for (const auto& t : e.args()) s += to_qsqrt3(t);
            return s;
        }
        case Kind::Mul: {
            QSqrt3 s(1);
            for (const auto& t : e.args()) s *= to_qsqrt3(t);
            return s;
        }
        case Kind::Sqrt: return sqrt_of(to_qsqrt3(e.args()[0]));
        case Kind::Pow: {
            QSqrt3 base = to_qsqrt3(e.args()[0]);
            const Expr& ex = e.args()[1];
            if (!ex.is_number()) break;
            const Rational& p = ex.value();
            if (denominator(p) == 1) return int_power(base, numerator(p));
            if (denominator(p) == 2) return int_power(sqrt_of(base), numerator(p));
            break;
        }
        default: break;
    }
    throw std::invalid_argument("not a constant of Q(sqrt 3): " + e.str());
}

// ---- QMatrix and exact linear algebra ----

QMatrix QMatrix::identity(std::size_t n) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

QMatrix QMatrix::operator+(const QMatrix& o) const {
    QMatrix r = *this;
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] += o.a_[k];
    return r;
}

QMatrix QMatrix::operator-(const QMatrix& o) const {
    QMatrix r = *this;
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] -= o.a_[k];
    return r;
}

QMatrix QMatrix::operator*(const QMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix shapes do not match");
    QMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const QSqrt3& x = (*this)(i, k);
            if (x.is_zero()) continue;
            for (std::size_t j = 0; j < o.cols_; ++j)
                if (!o(k, j).is_zero()) r(i, j) += x * o(k, j);
        }
    return r;
}

QMatrix QMatrix::scaled(const QSqrt3& s) const {
    QMatrix r = *this;
    for (auto& x : r.a_) x *= s;
    return r;
}

QMatrix QMatrix::transpose() const {
    QMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

bool QMatrix::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const QSqrt3& x) { return x.is_zero(); });
}

namespace {

// in-place reduced row echelon form; returns pivot columns
std::vector<std::size_t> rref(QMatrix& m, std::size_t ncols) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < ncols && row < m.rows(); ++col) {
        std::size_t p = row;
        while (p < m.rows() && m(p, col).is_zero()) ++p;
        if (p == m.rows()) continue;
        if (p != row)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
        QSqrt3 inv = m(row, col).inverse();
        for (std::size_t j = col; j < m.cols(); ++j) m(row, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row || m(i, col).is_zero()) continue;
            QSqrt3 f = m(i, col);
            for (std::size_t j = col; j < m.cols(); ++j)
                if (!m(row, j).is_zero()) m(i, j) -= f * m(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

// unique solution of a x = b when it exists
std::optional<std::vector<QSqrt3>> solve(const QMatrix& a, const std::vector<QSqrt3>& b) {
    QMatrix aug(a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
        aug(i, a.cols()) = b[i];
    }
    auto piv = rref(aug, a.cols());
    for (std::size_t i = piv.size(); i < aug.rows(); ++i)
        if (!aug(i, a.cols()).is_zero()) return std::nullopt;
    std::vector<QSqrt3> x(a.cols());
    for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug(r, a.cols());
    return x;
}

}  // namespace

std::size_t rank(QMatrix m) { return rref(m, m.cols()).size(); }

std::vector<std::vector<QSqrt3>> nullspace(QMatrix m) {
    const std::size_t n = m.cols();
    auto piv = rref(m, n);
    std::vector<bool> is_pivot(n, false);
    for (auto c : piv) is_pivot[c] = true;
    std::vector<std::vector<QSqrt3>> out;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        std::vector<QSqrt3> v(n);
        v[f] = 1;
        for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m(r, f);
        out.push_back(std::move(v));
    }
    return out;
}

Signature inertia(QMatrix a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("inertia needs a square matrix");
    auto swap_sym = [&](std::size_t p, std::size_t q) {
        if (p == q) return;
        for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(q, j));
        for (std::size_t i = 0; i < n; ++i) std::swap(a(i, p), a(i, q));
    };
    Signature s;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a(p, p).is_zero()) ++p;
        if (p == n) {
            // zero diagonal: fold a nonzero off-diagonal entry onto it by congruence
            std::size_t pi = n, pj = n;
            for (std::size_t i = k; i < n && pi == n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (!a(i, j).is_zero()) {
                        pi = i;
                        pj = j;
                        break;
                    }
            if (pi == n) {
                s.zero += static_cast<int>(n - k);
                break;
            }
            for (std::size_t j = 0; j < n; ++j) a(pi, j) += a(pj, j);
            for (std::size_t i = 0; i < n; ++i) a(i, pi) += a(i, pj);
            p = pi;
        }
        swap_sym(p, k);
        const QSqrt3 d = a(k, k);
        (d.sign() > 0 ? s.positive : s.negative)++;
        const QSqrt3 dinv = d.inverse();
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k).is_zero()) continue;
            QSqrt3 f = a(i, k) * dinv;
            for (std::size_t j = k + 1; j < n; ++j)
                if (!a(k, j).is_zero()) a(i, j) -= f * a(k, j);
        }
        for (std::size_t i = k + 1; i < n; ++i) a(i, k) = a(k, i) = QSqrt3();
    }
    return s;
}

bool proportional(const QMatrix& a, const QMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.is_zero() || b.is_zero()) return false;
    const auto& fa = a.flat();
    const auto& fb = b.flat();
    std::size_t k = 0;
    while (fb[k].is_zero()) ++k;
    QSqrt3 lambda = fa[k] / fb[k];
    for (std::size_t i = 0; i < fa.size(); ++i)
        if (fa[i] != lambda * fb[i]) return false;
    return true;
}

// ---- structure constants ----

StructureConstantTable::StructureConstantTable(std::vector<std::string> labels)
    : labels_(std::move(labels)), c_(labels_.size() * labels_.size() * labels_.size()) {}

int StructureConstantTable::index(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    return it == labels_.end() ? -1 : static_cast<int>(it - labels_.begin());
}

void StructureConstantTable::set(std::size_t k, std::size_t i, std::size_t j, const QSqrt3& v) {
    const std::size_t n = dim();
    if (i == j && !v.is_zero()) throw std::invalid_argument("c^k_ii must vanish");
    c_[(k * n + i) * n + j] = v;
    c_[(k * n + j) * n + i] = -v;
}

std::string to_string(FlatSystem s) { return s == FlatSystem::Syspoint ? "syspoint" : "g2-flat"; }

namespace {

// coef * a ^ b in the differential of one basis form
struct WedgeTerm {
    const char* a;
    const char* b;
    long long num, den;
};

using DSystem = std::vector<std::pair<const char*, std::vector<WedgeTerm>>>;

StructureConstantTable table_from(const std::vector<std::string>& labels, const DSystem& sys) {
    StructureConstantTable t(labels);
    for (const auto& [form, terms] : sys) {
        const int k = t.index(form);
        for (const auto& w : terms) {
            const int i = t.index(w.a), j = t.index(w.b);
            if (k < 0 || i < 0 || j < 0) throw std::logic_error("unknown form label");
            // d theta^k = -c^k_ij theta^i ^ theta^j summed over i < j
            Rational v(w.num, w.den);
            QSqrt3 cur = t(k, i, j);
            t.set(k, i, j, cur - QSqrt3(v));
        }
    }
    return t;
}

const std::vector<std::string>& point_labels() {
    static const std::vector<std::string> l{"theta1", "theta2", "theta3", "theta4", "Omega1", "Omega2", "Omega3"};
    return l;
}

const std::vector<std::string>& g2_labels() {
    static const std::vector<std::string> l{"theta1", "theta2", "theta3", "theta4", "theta5",
                                            "Omega1", "Omega2", "Omega3", "Omega4", "Omega5",
                                            "Omega6", "Omega7", "Omega8", "Omega9"};
    return l;
}

const DSystem& point_system() {
    static const DSystem s{
        {"theta1", {{"Omega1", "theta1", 1, 1}, {"theta4", "theta2", 1, 1}}},
        {"theta2", {{"Omega2", "theta2", 1, 1}, {"Omega3", "theta1", 1, 1}, {"theta4", "theta3", 1, 1}}},
        {"theta3", {{"Omega2", "theta3", 2, 1}, {"Omega1", "theta3", -1, 1}, {"Omega3", "theta2", 1, 1}}},
        {"theta4", {{"Omega1", "theta4", 1, 1}, {"Omega2", "theta4", -1, 1}}},
        {"Omega1", {{"Omega3", "theta4", -1, 1}}},
        {"Omega2", {}},
        {"Omega3", {{"Omega2", "Omega3", 1, 1}, {"Omega1", "Omega3", -1, 1}}},
    };
    return s;
}

const DSystem& g2_system() {
    static const DSystem s{
        {"theta1",
         {{"theta1", "Omega1", 2, 1}, {"theta1", "Omega4", 1, 1}, {"theta2", "Omega2", 1, 1}, {"theta3", "theta4", 1, 1}}},
        {"theta2",
         {{"theta1", "Omega3", 1, 1}, {"theta2", "Omega1", 1, 1}, {"theta2", "Omega4", 2, 1}, {"theta3", "theta5", 1, 1}}},
        {"theta3",
         {{"theta1", "Omega5", 1, 1},
          {"theta2", "Omega6", 1, 1},
          {"theta3", "Omega1", 1, 1},
          {"theta3", "Omega4", 1, 1},
          {"theta4", "theta5", 1, 1}}},
        {"theta4",
         {{"theta1", "Omega7", 1, 1}, {"theta3", "Omega6", 4, 3}, {"theta4", "Omega1", 1, 1}, {"theta5", "Omega2", 1, 1}}},
        {"theta5",
         {{"theta2", "Omega7", 1, 1}, {"theta3", "Omega5", -4, 3}, {"theta4", "Omega3", 1, 1}, {"theta5", "Omega4", 1, 1}}},
        {"Omega1",
         {{"Omega3", "Omega2", 1, 1},
          {"theta3", "Omega7", 1, 3},
          {"theta4", "Omega5", -2, 3},
          {"theta5", "Omega6", 1, 3},
          {"theta1", "Omega8", 1, 1}}},
        {"Omega2",
         {{"Omega2", "Omega1", 1, 1}, {"Omega2", "Omega4", -1, 1}, {"theta4", "Omega6", -1, 1}, {"theta1", "Omega9", 1, 1}}},
        {"Omega3",
         {{"Omega3", "Omega4", 1, 1}, {"Omega3", "Omega1", -1, 1}, {"theta5", "Omega5", -1, 1}, {"theta2", "Omega8", 1, 1}}},
        {"Omega4",
         {{"Omega2", "Omega3", 1, 1},
          {"theta3", "Omega7", 1, 3},
          {"theta4", "Omega5", 1, 3},
          {"theta5", "Omega6", -2, 3},
          {"theta2", "Omega9", 1, 1}}},
        {"Omega5",
         {{"Omega1", "Omega5", 1, 1}, {"Omega3", "Omega6", 1, 1}, {"theta5", "Omega7", -1, 1}, {"theta3", "Omega8", 1, 1}}},
        {"Omega6",
         {{"Omega2", "Omega5", 1, 1}, {"Omega4", "Omega6", 1, 1}, {"theta4", "Omega7", 1, 1}, {"theta3", "Omega9", 1, 1}}},
        {"Omega7",
         {{"Omega5", "Omega6", 4, 3},
          {"Omega1", "Omega7", 1, 1},
          {"Omega4", "Omega7", 1, 1},
          {"theta4", "Omega8", 1, 1},
          {"theta5", "Omega9", 1, 1}}},
        {"Omega8",
         {{"Omega5", "Omega7", 1, 1}, {"Omega1", "Omega8", 2, 1}, {"Omega4", "Omega8", 1, 1}, {"Omega3", "Omega9", 1, 1}}},
        {"Omega9",
         {{"Omega6", "Omega7", 1, 1}, {"Omega1", "Omega9", 1, 1}, {"Omega4", "Omega9", 2, 1}, {"Omega2", "Omega8", 1, 1}}},
    };
    return s;
}

}  // namespace

StructureConstantTable flat_structure_constants(FlatSystem s) {
    return s == FlatSystem::Syspoint ? table_from(point_labels(), point_system()) : table_from(g2_labels(), g2_system());
}

JacobiVerdict jacobi_check(const StructureConstantTable& t) {
    const std::size_t n = t.dim();
    JacobiVerdict v;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                for (std::size_t m = 0; m < n; ++m) {
                    QSqrt3 s;
                    for (std::size_t l = 0; l < n; ++l) {
                        if (!t(l, i, j).is_zero()) s += t(l, i, j) * t(m, l, k);
                        if (!t(l, j, k).is_zero()) s += t(l, j, k) * t(m, l, i);
                        if (!t(l, k, i).is_zero()) s += t(l, k, i) * t(m, l, j);
                    }
                    if (!s.is_zero()) {
                        v.ok = false;
                        v.triple = {i, j, k};
                        v.component = m;
                        v.value = s;
                        return v;
                    }
                }
    return v;
}

KillingAnalysis killing_analysis(const StructureConstantTable& t) {
    const std::size_t n = t.dim();
    KillingAnalysis k;
    k.form = QMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            QSqrt3 s;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    if (!t(a, i, b).is_zero() && !t(b, j, a).is_zero()) s += t(a, i, b) * t(b, j, a);
            k.form(i, j) = s;
        }
    k.rank = rank(k.form);
    k.nondegenerate = k.rank == n;
    k.signature = inertia(k.form);
    return k;
}

// ---- left-invariant differential ----

StructureDifferential structure_differential(const StructureConstantTable& t) {
    const Chart chart("left-invariant", t.labels());
    const std::size_t n = t.dim();
    std::vector<Form> d_basis;
    for (std::size_t k = 0; k < n; ++k) {
        Form w(chart, 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (!t(k, i, j).is_zero())
                    w.add_term({static_cast<int>(i), static_cast<int>(j)}, (-t(k, i, j)).to_expr());
        d_basis.push_back(std::move(w));
    }
    return StructureDifferential(std::move(d_basis));
}

std::vector<std::size_t> d_squared_failures(const StructureConstantTable& t) {
    const auto d = structure_differential(t);
    std::vector<std::size_t> bad;
    for (std::size_t k = 0; k < t.dim(); ++k) {
        Form dd = d(d(Form::differential(d.chart(), t.labels()[k])));
        bool zero = true;
        for (const auto& c : dd.coefficients())
            if (!to_qsqrt3(c).is_zero()) zero = false;
        if (!zero) bad.push_back(k);
    }
    return bad;
}

// ---- matrix connections ----

std::string to_string(Connection c) {
    switch (c) {
        case Connection::Conpoint: return "conpoint";
        case Connection::Caln: return "caln";
        case Connection::Ccg2: return "ccg2";
    }
    return "?";
}

const std::vector<std::vector<std::string>>& connection_entries(Connection c) {
    static const std::vector<std::vector<std::string>> conpoint{
        {"Omega2", "0", "0", "0", "0"},
        {"theta1", "Omega2-Omega1", "-theta4", "0", "0"},
        {"theta2", "-Omega3", "0", "-theta4", "0"},
        {"theta3", "0", "-Omega3", "Omega1-Omega2", "0"},
        {"0", "theta3", "-theta2", "theta1", "-Omega2"},
    };
    static const std::vector<std::vector<std::string>> caln{
        {"Omega2/2", "(Omega1-Omega2)/4", "-theta4/4", "Omega3/4", "tau4", "tau5", "Gamma34/2", "0"},
        {"Omega1-Omega2", "Omega2/2", "theta4/2", "Gamma13", "0", "-Gamma24", "-Gamma34", "tau4"},
        {"-Omega3", "Omega3/2", "Omega1/2", "Gamma23", "Gamma24", "0", "Gamma26", "tau5"},
        {"theta4", "theta4/2", "0", "-Omega1/2+Omega2", "Gamma34", "-Gamma26", "0", "Gamma34/2"},
        {"theta2", "0", "-theta1/2", "theta3/2", "-Omega2/2", "-Omega3/2", "-theta4/2", "(Omega1-Omega2)/4"},
        {"theta1", "theta1/2", "0", "theta2/2", "-theta4/2", "-Omega1/2", "0", "-theta4/4"},
        {"theta3", "-theta3/2", "-theta2/2", "0", "-Gamma13", "-Gamma23", "Omega1/2-Omega2", "Omega3/4"},
        {"0", "theta2", "theta1", "theta3", "Omega1-Omega2", "-Omega3", "theta4", "-Omega2/2"},
    };
    static const std::vector<std::vector<std::string>> ccg2{
        {"-Omega1-Omega4", "-Omega8", "-Omega9", "-Omega7/sqrt(3)", "Omega5/3", "Omega6/3", "0"},
        {"theta1", "Omega1", "Omega2", "theta4/sqrt(3)", "-theta3/3", "0", "Omega6/3"},
        {"theta2", "Omega3", "Omega4", "theta5/sqrt(3)", "0", "-theta3/3", "-Omega5/3"},
        {"2*theta3/sqrt(3)", "2*Omega5/sqrt(3)", "2*Omega6/sqrt(3)", "0", "theta5/sqrt(3)", "-theta4/sqrt(3)",
         "-Omega7/sqrt(3)"},
        {"theta4", "Omega7", "0", "2*Omega6/sqrt(3)", "-Omega4", "Omega2", "Omega9"},
        {"theta5", "0", "Omega7", "-2*Omega5/sqrt(3)", "Omega3", "-Omega1", "-Omega8"},
        {"0", "theta5", "-theta4", "2*theta3/sqrt(3)", "-theta2", "theta1", "Omega1+Omega4"},
    };
    switch (c) {
        case Connection::Conpoint: return conpoint;
        case Connection::Caln: return caln;
        case Connection::Ccg2: return ccg2;
    }
    throw std::invalid_argument("unknown connection");
}

const std::vector<std::string>& connection_labels(Connection c) {
    return c == Connection::Ccg2 ? g2_labels() : point_labels();
}

namespace {

// caln with every scalar invariant set to zero
const std::map<std::string, Expr>& caln_flat() {
    static const std::map<std::string, Expr> m{
        {"tau4", Expr(0)},    {"tau5", Expr(0)},    {"Gamma13", parse("Omega3/2")},
        {"Gamma23", Expr(0)}, {"Gamma24", Expr(0)}, {"Gamma26", Expr(0)},
        {"Gamma34", Expr(0)},
    };
    return m;
}

}  // namespace

MatrixBasis extract_generators(const std::vector<std::vector<std::string>>& entries,
                               const std::vector<std::string>& labels,
                               const std::map<std::string, Expr>& specialization) {
    MatrixBasis b;
    b.labels = labels;
    const std::size_t rows = entries.size(), cols = rows ? entries[0].size() : 0;
    std::vector<Expr> parsed;
    for (const auto& row : entries) {
        if (row.size() != cols) throw std::invalid_argument("ragged connection matrix");
        for (const auto& text : row) parsed.push_back(substitute(parse(text), specialization));
    }
    for (const auto& label : labels) {
        std::map<std::string, Expr> pick;
        for (const auto& other : labels) pick[other] = Expr(other == label ? 1 : 0);
        QMatrix m(rows, cols);
        for (std::size_t k = 0; k < parsed.size(); ++k) m(k / cols, k % cols) = to_qsqrt3(substitute(parsed[k], pick));
        b.generators.push_back(std::move(m));
    }
    return b;
}

MatrixBasis matrix_rep(Connection c) {
    static const std::map<std::string, Expr> none;
    return extract_generators(connection_entries(c), connection_labels(c), c == Connection::Caln ? caln_flat() : none);
}

namespace {

QMatrix span_matrix(const MatrixBasis& b) {
    const std::size_t n = b.generators.size();
    const std::size_t entries = n ? b.generators[0].flat().size() : 0;
    QMatrix m(entries, n);
    for (std::size_t g = 0; g < n; ++g)
        for (std::size_t e = 0; e < entries; ++e) m(e, g) = b.generators[g].flat()[e];
    return m;
}

}  // namespace

bool linearly_independent(const MatrixBasis& b) { return rank(span_matrix(b)) == b.generators.size(); }

MatrixBasis rotation_basis() {
    MatrixBasis b;
    b.labels = {"Lx", "Ly", "Lz"};
    for (int axis = 0; axis < 3; ++axis) {
        QMatrix m(3, 3);
        int i = (axis + 1) % 3, j = (axis + 2) % 3;
        m(i, j) = -1;
        m(j, i) = 1;
        b.generators.push_back(m);
    }
    return b;
}

MatrixBasis random_basis(std::size_t count, std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> dist(-3, 3);
    MatrixBasis b;
    for (std::size_t g = 0; g < count; ++g) {
        b.labels.push_back("X" + std::to_string(g + 1));
        QMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = dist(rng);
        b.generators.push_back(m);
    }
    return b;
}

ClosureResult commutator_closure_check(const MatrixBasis& b) {
    if (!linearly_independent(b)) throw std::invalid_argument("generators are linearly dependent");
    const std::size_t n = b.generators.size();
    const QMatrix span = span_matrix(b);
    ClosureResult r;
    r.constants = StructureConstantTable(b.labels);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& X = b.generators[i];
            const auto& Y = b.generators[j];
            QMatrix br = X * Y - Y * X;
            auto coeffs = solve(span, br.flat());
            if (!coeffs) {
                r.closed = false;
                r.failing = {i, j};
                r.constants = StructureConstantTable(b.labels);
                return r;
            }
            for (std::size_t k = 0; k < n; ++k) r.constants.set(k, i, j, (*coeffs)[k]);
        }
    return r;
}

bool same_bracket(const StructureConstantTable& a, const StructureConstantTable& b) {
    const std::size_t n = a.dim();
    if (b.dim() != n) return false;
    std::vector<std::size_t> map(n);
    for (std::size_t i = 0; i < n; ++i) {
        int j = b.index(a.labels()[i]);
        if (j < 0) return false;
        map[i] = static_cast<std::size_t>(j);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (a(k, i, j) != b(map[k], map[i], map[j])) return false;
    return true;
}

// ---- invariant forms ----

BilinearFormResult invariant_bilinear_form(const MatrixBasis& b) {
    BilinearFormResult res;
    if (b.generators.empty()) return res;
    const std::size_t n = b.generators[0].rows();
    std::vector<std::vector<std::size_t>> unknown(n, std::vector<std::size_t>(n));
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) unknown[i][j] = unknown[j][i] = m++;
    QMatrix eqs(b.generators.size() * m, m);
    std::size_t row = 0;
    for (const auto& X : b.generators)
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = r; c < n; ++c, ++row)
                for (std::size_t s = 0; s < n; ++s) {
                    // (X^T B + B X)(r, c)
                    eqs(row, unknown[s][c]) += X(s, r);
                    eqs(row, unknown[r][s]) += X(s, c);
                }
    for (const auto& v : nullspace(eqs)) {
        QMatrix B(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) B(i, j) = v[unknown[i][j]];
        res.solutions.push_back(std::move(B));
    }
    if (!res.solutions.empty()) {
        QMatrix g(n, n);
        for (std::size_t k = 0; k < res.solutions.size(); ++k) g = g + res.solutions[k].scaled(QSqrt3(int(k) + 1));
        res.signature = inertia(g);
        res.generic = std::move(g);
    }
    return res;
}

std::vector<std::array<int, 3>> three_form_slots(std::size_t n) {
    std::vector<std::array<int, 3>> out;
    for (int a = 0; a < int(n); ++a)
        for (int b = a + 1; b < int(n); ++b)
            for (int c = b + 1; c < int(n); ++c) out.push_back({a, b, c});
    return out;
}

namespace {

using Mask = std::uint32_t;
using Multivector = std::map<Mask, QSqrt3>;

// sign of the shuffle taking (a, b) to sorted order
int wedge_sign(Mask a, Mask b) {
    int swaps = 0;
    for (Mask bb = b; bb; bb &= bb - 1) {
        int j = std::countr_zero(bb);
        swaps += std::popcount(a >> (j + 1));
    }
    return swaps % 2 ? -1 : 1;
}

Multivector wedge_mv(const Multivector& x, const Multivector& y) {
    Multivector out;
    for (const auto& [a, ca] : x)
        for (const auto& [b, cb] : y) {
            if (a & b) continue;
            QSqrt3 v = ca * cb;
            if (wedge_sign(a, b) < 0) v = -v;
            out[a | b] += v;
        }
    return out;
}

Multivector interior_mv(int i, const Multivector& x) {
    Multivector out;
    const Mask bit = Mask(1) << i;
    for (const auto& [a, c] : x) {
        if (!(a & bit)) continue;
        int before = std::popcount(a & (bit - 1));
        out[a & ~bit] += before % 2 ? -c : c;
    }
    return out;
}

}  // namespace

QMatrix induced_bilinear_form(const std::vector<QSqrt3>& phi) {
    const std::size_t n = 7;
    auto slots = three_form_slots(n);
    if (phi.size() != slots.size()) throw std::invalid_argument("expected a 3-form on R^7");
    Multivector f;
    for (std::size_t s = 0; s < slots.size(); ++s)
        if (!phi[s].is_zero()) f[(Mask(1) << slots[s][0]) | (Mask(1) << slots[s][1]) | (Mask(1) << slots[s][2])] = phi[s];
    std::vector<Multivector> iota;
    for (int i = 0; i < int(n); ++i) iota.push_back(interior_mv(i, f));
    const Mask vol = (Mask(1) << n) - 1;
    QMatrix B(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            auto top = wedge_mv(wedge_mv(iota[i], iota[j]), f);
            auto it = top.find(vol);
            B(i, j) = B(j, i) = it == top.end() ? QSqrt3() : it->second;
        }
    return B;
}

ThreeFormResult invariant_three_form(const MatrixBasis& b) {
    ThreeFormResult res;
    if (b.generators.empty()) return res;
    const std::size_t n = b.generators[0].rows();
    auto slots = three_form_slots(n);
    std::map<std::array<int, 3>, std::size_t> slot_index;
    for (std::size_t s = 0; s < slots.size(); ++s) slot_index[slots[s]] = s;
    // phi(a, b, c) as (sign, unknown) for arbitrary indices
    auto lookup = [&](int a, int b2, int c) -> std::pair<int, std::size_t> {
        if (a == b2 || b2 == c || a == c) return {0, 0};
        std::array<int, 3> t{a, b2, c};
        int sign = 1;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j + 1 < 3 - i; ++j)
                if (t[j] > t[j + 1]) {
                    std::swap(t[j], t[j + 1]);
                    sign = -sign;
                }
        return {sign, slot_index.at(t)};
    };
    QMatrix eqs(b.generators.size() * slots.size(), slots.size());
    std::size_t row = 0;
    for (const auto& X : b.generators)
        for (const auto& [a, b2, c] : slots) {
            for (int s = 0; s < int(n); ++s) {
                for (auto [coef, sl] : {std::pair{X(s, a), lookup(s, b2, c)}, std::pair{X(s, b2), lookup(a, s, c)},
                                        std::pair{X(s, c), lookup(a, b2, s)}}) {
                    if (sl.first == 0 || coef.is_zero()) continue;
                    eqs(row, sl.second) += sl.first > 0 ? coef : -coef;
                }
            }
            ++row;
        }
    res.solutions = nullspace(eqs);
    if (!res.solutions.empty() && n == 7) {
        QMatrix B = induced_bilinear_form(res.solutions[0]);
        res.generic = rank(B) == n;
        res.signature = inertia(B);
        res.induced = std::move(B);
    }
    return res;
}

}  // namespace odegeom
