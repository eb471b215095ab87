#include "odegeom/lie.hpp"
#include "odegeom/parse.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <set>

using namespace odegeom;

namespace {

// eigenvalue counts of a symmetric matrix in double precision
Signature float_signature(const QMatrix& m) {
    Eigen::MatrixXd a(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) a(static_cast<int>(i), static_cast<int>(j)) = m(i, j).approx();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const double scale = 1 + es.eigenvalues().cwiseAbs().maxCoeff();
    Signature s;
    for (double ev : es.eigenvalues()) {
        if (std::abs(ev) < 1e-9 * scale) ++s.zero;
        else if (ev > 0) ++s.positive;
        else ++s.negative;
    }
    return s;
}

// Killing form from the bracket, written out again
QMatrix killing_by_hand(const StructureConstantTable& t) {
    const std::size_t n = t.dim();
    QMatrix K(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) K(i, j) += t(a, i, b) * t(b, j, a);
    return K;
}

bool up_to_sign(const Signature& s, int p, int q) {
    return s.zero == 0 && ((s.positive == p && s.negative == q) || (s.positive == q && s.negative == p));
}

QMatrix commutator(const QMatrix& a, const QMatrix& b) { return a * b - b * a; }

}  // namespace

TEST(QSqrt3, Arithmetic) {
    const QSqrt3 a(1, 1), b(1, -1);
    EXPECT_EQ(a * b, QSqrt3(-2));
    EXPECT_EQ(a * a.inverse(), QSqrt3(1));
    EXPECT_EQ(QSqrt3::sqrt3() * QSqrt3::sqrt3(), QSqrt3(3));
    EXPECT_EQ(QSqrt3(Rational(1), Rational(-1)).sign(), -1);  // 1 - 1.732
    EXPECT_EQ(QSqrt3(Rational(-1), Rational(1)).sign(), 1);
    EXPECT_EQ(QSqrt3(Rational(7, 4), Rational(-1)).sign(), 1);  // 1.75 > 1.732
    EXPECT_EQ(to_qsqrt3(parse("2*sqrt(3)/3 - 1/2")), QSqrt3(Rational(-1, 2), Rational(2, 3)));
    EXPECT_EQ(to_qsqrt3(a.to_expr()), a);
    EXPECT_EQ(to_qsqrt3(parse(a.str())), a);
    EXPECT_THROW(to_qsqrt3(parse("sqrt(2)")), std::invalid_argument);
    EXPECT_THROW(to_qsqrt3(parse("x")), std::invalid_argument);
}

TEST(QMatrix, RankAndInertia) {
    QMatrix m(3, 3);
    m(0, 1) = m(1, 0) = 1;
    m(2, 2) = QSqrt3::sqrt3();
    EXPECT_EQ(rank(m), 3u);
    EXPECT_EQ(inertia(m), (Signature{2, 1, 0}));
    EXPECT_EQ(float_signature(m), inertia(m));
    QMatrix z(3, 3);
    z(0, 0) = 1;
    EXPECT_EQ(nullspace(z).size(), 2u);
    EXPECT_TRUE(proportional(m.scaled(QSqrt3(Rational(-2), Rational(1))), m));
    EXPECT_FALSE(proportional(m, z));
}

TEST(StructureConstants, AntisymmetricTables) {
    for (auto s : {FlatSystem::Syspoint, FlatSystem::G2}) {
        const auto t = flat_structure_constants(s);
        for (std::size_t k = 0; k < t.dim(); ++k)
            for (std::size_t i = 0; i < t.dim(); ++i)
                for (std::size_t j = 0; j < t.dim(); ++j) EXPECT_EQ(t(k, i, j), -t(k, j, i));
    }
    EXPECT_EQ(flat_structure_constants(FlatSystem::Syspoint).dim(), 7u);
    EXPECT_EQ(flat_structure_constants(FlatSystem::G2).dim(), 14u);
}

TEST(StructureConstants, JacobiAndDSquared) {
    for (auto s : {FlatSystem::Syspoint, FlatSystem::G2}) {
        const auto t = flat_structure_constants(s);
        EXPECT_TRUE(jacobi_check(t).ok) << to_string(s);
        EXPECT_TRUE(d_squared_failures(t).empty()) << to_string(s);
    }
}

TEST(StructureConstants, MutationBreaksJacobiAndDSquared) {
    auto t = flat_structure_constants(FlatSystem::G2);
    const int k = t.index("theta1"), i = t.index("theta2"), j = t.index("theta3");
    ASSERT_GE(k, 0);
    ASSERT_GE(i, 0);
    ASSERT_GE(j, 0);
    t.set(k, i, j, t(k, i, j) + QSqrt3(1));
    EXPECT_EQ(t(k, j, i), -t(k, i, j));
    const auto v = jacobi_check(t);
    EXPECT_FALSE(v.ok);
    EXPECT_FALSE(v.value.is_zero());
    EXPECT_FALSE(d_squared_failures(t).empty());
}

TEST(Killing, FlatTables) {
    const auto g2 = killing_analysis(flat_structure_constants(FlatSystem::G2));
    EXPECT_TRUE(g2.nondegenerate);
    EXPECT_EQ(g2.signature, (Signature{8, 6, 0}));
    EXPECT_EQ(float_signature(g2.form), g2.signature);
    EXPECT_EQ(g2.form, killing_by_hand(flat_structure_constants(FlatSystem::G2)));

    const auto sp = killing_analysis(flat_structure_constants(FlatSystem::Syspoint));
    EXPECT_FALSE(sp.nondegenerate);
    EXPECT_EQ(sp.rank, 4u);
    EXPECT_EQ(sp.signature, (Signature{3, 1, 3}));
    EXPECT_EQ(float_signature(sp.form), sp.signature);
}

TEST(Killing, AbelianTable) {
    const StructureConstantTable t({"a", "b", "c"});
    const auto k = killing_analysis(t);
    EXPECT_EQ(k.signature, (Signature{0, 0, 3}));
    EXPECT_EQ(k.rank, 0u);
    EXPECT_TRUE(jacobi_check(t).ok);
}

TEST(MatrixRep, Shapes) {
    const auto g2 = matrix_rep(Connection::Ccg2);
    EXPECT_EQ(g2.generators.size(), 14u);
    EXPECT_EQ(g2.generators.front().rows(), 7u);
    EXPECT_TRUE(linearly_independent(g2));
    const auto cp = matrix_rep(Connection::Conpoint);
    EXPECT_EQ(cp.generators.size(), 7u);
    EXPECT_EQ(cp.generators.front().rows(), 5u);
    EXPECT_TRUE(linearly_independent(cp));
    const auto cn = matrix_rep(Connection::Caln);
    EXPECT_EQ(cn.generators.size(), 7u);
    EXPECT_EQ(cn.generators.front().rows(), 8u);
    EXPECT_TRUE(linearly_independent(cn));
}

TEST(Closure, Ccg2MatchesFlatTable) {
    const auto b = matrix_rep(Connection::Ccg2);
    const auto c = commutator_closure_check(b);
    ASSERT_TRUE(c.closed);
    EXPECT_TRUE(same_bracket(c.constants, flat_structure_constants(FlatSystem::G2)));
    EXPECT_TRUE(jacobi_check(c.constants).ok);
    // every induced constant reproduces the commutator
    for (std::size_t i = 0; i < b.generators.size(); ++i)
        for (std::size_t j = 0; j < b.generators.size(); ++j) {
            QMatrix rhs(7, 7);
            for (std::size_t k = 0; k < b.generators.size(); ++k)
                rhs = rhs + b.generators[k].scaled(c.constants(k, i, j));
            EXPECT_EQ(commutator(b.generators[i], b.generators[j]), rhs) << i << "," << j;
        }
}

TEST(Closure, OtherConnections) {
    const auto cp = commutator_closure_check(matrix_rep(Connection::Conpoint));
    ASSERT_TRUE(cp.closed);
    EXPECT_TRUE(jacobi_check(cp.constants).ok);
    EXPECT_FALSE(killing_analysis(cp.constants).nondegenerate);
    EXPECT_TRUE(commutator_closure_check(matrix_rep(Connection::Caln)).closed);
    EXPECT_FALSE(commutator_closure_check(random_basis(3, 4, 1)).closed);
}

TEST(Closure, MismatchedLabelsAreNotTheSameBracket) {
    auto t = flat_structure_constants(FlatSystem::G2);
    EXPECT_TRUE(same_bracket(t, t));
    EXPECT_FALSE(same_bracket(t, flat_structure_constants(FlatSystem::Syspoint)));
    const int k = t.index("theta1"), i = t.index("theta2"), j = t.index("theta3");
    t.set(k, i, j, t(k, i, j) + QSqrt3(1));
    EXPECT_FALSE(same_bracket(t, flat_structure_constants(FlatSystem::G2)));
}

TEST(InvariantForms, Ccg2BilinearForm) {
    const auto b = matrix_rep(Connection::Ccg2);
    const auto r = invariant_bilinear_form(b);
    ASSERT_EQ(r.solutions.size(), 1u);
    ASSERT_TRUE(r.generic.has_value());
    EXPECT_TRUE(up_to_sign(r.signature, 4, 3));
    EXPECT_EQ(float_signature(*r.generic), r.signature);
    for (const auto& X : b.generators) EXPECT_TRUE((X.transpose() * *r.generic + *r.generic * X).is_zero());
}

TEST(InvariantForms, CalnAndConpoint) {
    const auto cn = invariant_bilinear_form(matrix_rep(Connection::Caln));
    ASSERT_TRUE(cn.generic.has_value());
    EXPECT_EQ(cn.signature, (Signature{4, 4, 0}));
    const auto cp = invariant_bilinear_form(matrix_rep(Connection::Conpoint));
    ASSERT_EQ(cp.solutions.size(), 1u);
    EXPECT_TRUE(up_to_sign(cp.signature, 3, 2));
}

TEST(InvariantForms, RotationsPreserveIdentity) {
    const auto r = invariant_bilinear_form(rotation_basis());
    ASSERT_EQ(r.solutions.size(), 1u);
    EXPECT_TRUE(proportional(r.solutions[0], QMatrix::identity(3)));
}

TEST(InvariantForms, Ccg2ThreeForm) {
    const auto b = matrix_rep(Connection::Ccg2);
    const auto r = invariant_three_form(b);
    ASSERT_EQ(r.solutions.size(), 1u);
    EXPECT_EQ(r.solutions[0].size(), 35u);
    EXPECT_TRUE(r.generic);
    ASSERT_TRUE(r.induced.has_value());
    EXPECT_TRUE(up_to_sign(r.signature, 4, 3));
    EXPECT_TRUE(proportional(*r.induced, *invariant_bilinear_form(b).generic));
    EXPECT_EQ(*r.induced, induced_bilinear_form(r.solutions[0]));
}

TEST(InvariantForms, RandomBasisHasNoThreeForm) {
    const auto r = invariant_three_form(random_basis(14, 7, 3));
    EXPECT_TRUE(r.solutions.empty());
    EXPECT_FALSE(r.generic);
    EXPECT_TRUE(invariant_bilinear_form(random_basis(14, 7, 3)).solutions.empty());
}

TEST(InvariantForms, ThreeFormSlots) {
    const auto s = three_form_slots(7);
    EXPECT_EQ(s.size(), 35u);
    EXPECT_EQ(s.front(), (std::array<int, 3>{0, 1, 2}));
    EXPECT_EQ(s.back(), (std::array<int, 3>{4, 5, 6}));
    const std::set<std::array<int, 3>> distinct(s.begin(), s.end());
    EXPECT_EQ(distinct.size(), 35u);
}
