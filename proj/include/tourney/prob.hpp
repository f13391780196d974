#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tourney/model.hpp"
#include "tourney/random.hpp"

namespace tourney {

/// p(i, j) + p(j, i) == 1 off the diagonal, entries in [0, 1].
template <typename Derived>
bool is_complementary(const Eigen::MatrixBase<Derived>& p, double tol = 1e-12) {
    if (p.rows() != p.cols()) return false;
    if ((p.array() < -tol).any() || (p.array() > 1.0 + tol).any()) return false;
    const auto off = (p + p.transpose()).array() - 1.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index j = 0; j < p.cols(); ++j)
            if (i != j && std::abs(off(i, j)) > tol) return false;
    return true;
}

/// Rows and columns ordered by true strength: for i < j < k,
/// p(i, k) >= p(i, j) and p(i, k) >= p(j, k).
template <typename Derived>
bool is_strength_monotone(const Eigen::MatrixBase<Derived>& p, double tol = 1e-12) {
    const Eigen::Index n = p.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            for (Eigen::Index k = j + 1; k < n; ++k)
                if (p(i, k) + tol < p(i, j) || p(i, k) + tol < p(j, k)) return false;
    return true;
}

/// Pairwise winning probabilities; p(a, b) is the chance that a beats b.
class WinMatrix {
  public:
    /// Throws std::invalid_argument unless `p` is square (n >= 2) and complementary.
    explicit WinMatrix(Eigen::MatrixXd p);

    static WinMatrix uniform(int n);
    /// The stronger player always wins.
    static WinMatrix deterministic(int n);

    int size() const { return static_cast<int>(p_.rows()); }
    double operator()(PlayerId a, PlayerId b) const { return p_(a.index(), b.index()); }
    const Eigen::MatrixXd& probabilities() const { return p_; }

  private:
    Eigen::MatrixXd p_;
};

struct SkillModel {
    double skill = 5.0;
};

/// p(a, b) = clamp(0.5 - skill * (a - b) / 100, 0, 1) over true ranks.
WinMatrix skill_matrix(SkillModel model, int n);

struct RatingEntry {
    std::string name;
    double rating = 0.0;
};

struct RatingTable {
    std::vector<RatingEntry> entries;
};

struct EloModel {
    WinMatrix matrix;
    std::vector<std::string> names;  // names[rank - 1]
};

/// Ranks players by rating (descending, ties by name) and applies the
/// logistic Elo expectation with scale 400.
EloModel elo_matrix(const RatingTable& table);

double elo_expectation(double rating_diff);

/// A match outcome; `a` wins iff one uniform draw falls below p(a, b).
inline PlayerId sample_match(const WinMatrix& m, PlayerId a, PlayerId b, RandomStream& rng) {
    return rng.uniform() < m(a, b) ? a : b;
}

/// Malformed input file; `line` is 1-based (0 when not line specific).
class ParseError : public std::runtime_error {
  public:
    ParseError(int line, const std::string& what);
    int line() const { return line_; }

  private:
    int line_;
};

/// CSV with header `name,rating`.
RatingTable read_rating_csv(std::istream& in);
RatingTable load_rating_file(const std::filesystem::path& path);

/// Headerless n x n CSV of probabilities; validated for complement and monotonicity.
WinMatrix read_matrix_csv(std::istream& in);
WinMatrix load_matrix_file(const std::filesystem::path& path);

}  // namespace tourney
