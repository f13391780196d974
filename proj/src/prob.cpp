#include "tourney/prob.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tourney {

WinMatrix::WinMatrix(Eigen::MatrixXd p) : p_(std::move(p)) {
    if (p_.rows() < 2 || p_.rows() != p_.cols())
        throw std::invalid_argument("win matrix must be square with n >= 2");
    if (!is_complementary(p_, 1e-9))
        throw std::invalid_argument("win matrix entries must lie in [0,1] with p(a,b) + p(b,a) = 1");
    p_.diagonal().setConstant(0.5);
}

WinMatrix WinMatrix::uniform(int n) {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    return WinMatrix(Eigen::MatrixXd::Constant(n, n, 0.5));
}

WinMatrix WinMatrix::deterministic(int n) {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    Eigen::MatrixXd p(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p(i, j) = i < j ? 1.0 : (i == j ? 0.5 : 0.0);
    return WinMatrix(std::move(p));
}

WinMatrix skill_matrix(SkillModel model, int n) {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    if (!(model.skill > 0.0) || !std::isfinite(model.skill))
        throw std::invalid_argument("skill must be positive");
    Eigen::MatrixXd p(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            p(a, b) = std::clamp(0.5 - model.skill * static_cast<double>(a - b) / 100.0, 0.0, 1.0);
    return WinMatrix(std::move(p));
}

double elo_expectation(double rating_diff) { return 1.0 / (1.0 + std::pow(10.0, -rating_diff / 400.0)); }

EloModel elo_matrix(const RatingTable& table) {
    const auto& entries = table.entries;
    if (entries.size() < 2) throw std::invalid_argument("rating table needs at least 2 entries");
    std::set<std::string> names;
    for (const auto& e : entries) {
        if (!std::isfinite(e.rating)) throw std::invalid_argument("rating of '" + e.name + "' is not finite");
        if (!names.insert(e.name).second) throw std::invalid_argument("duplicate player name '" + e.name + "'");
    }
    std::vector<RatingEntry> sorted = entries;
    std::sort(sorted.begin(), sorted.end(), [](const RatingEntry& x, const RatingEntry& y) {
        if (x.rating != y.rating) return x.rating > y.rating;
        return x.name < y.name;
    });
    const int n = static_cast<int>(sorted.size());
    Eigen::MatrixXd p(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) p(a, b) = elo_expectation(sorted[a].rating - sorted[b].rating);
    // Exact complement regardless of pow rounding.
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) p(b, a) = 1.0 - p(a, b);

    std::vector<std::string> order;
    order.reserve(sorted.size());
    for (auto& e : sorted) order.push_back(std::move(e.name));
    return EloModel{WinMatrix(std::move(p)), std::move(order)};
}

ParseError::ParseError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_real(std::string_view text, double& value) {
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(value);
}

}  // namespace

RatingTable read_rating_csv(std::istream& in) {
    RatingTable table;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (trim(view).empty()) continue;
        auto fields = split_fields(view);
        if (!header_seen) {
            if (fields.size() != 2 || fields[0] != "name" || fields[1] != "rating")
                throw ParseError(line_no, "expected header 'name,rating'");
            header_seen = true;
            continue;
        }
        if (fields.size() != 2) throw ParseError(line_no, "expected 2 fields, got " + std::to_string(fields.size()));
        if (fields[0].empty()) throw ParseError(line_no, "empty player name");
        double rating = 0.0;
        if (!parse_real(fields[1], rating))
            throw ParseError(line_no, "invalid rating '" + std::string(fields[1]) + "'");
        for (const auto& e : table.entries)
            if (e.name == fields[0]) throw ParseError(line_no, "duplicate player name '" + e.name + "'");
        table.entries.push_back({std::string(fields[0]), rating});
    }
    if (!header_seen) throw ParseError(0, "empty rating file");
    if (table.entries.size() < 2) throw ParseError(0, "rating file needs at least 2 entries");
    return table;
}

RatingTable load_rating_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open rating file " + path.string());
    return read_rating_csv(in);
}

WinMatrix read_matrix_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        for (std::string_view field : split_fields(line)) {
            double v = 0.0;
            if (!parse_real(field, v)) throw ParseError(line_no, "invalid probability '" + std::string(field) + "'");
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(line_no, "row has " + std::to_string(row.size()) + " entries, expected " +
                                          std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n < 2 || static_cast<Eigen::Index>(rows.front().size()) != n)
        throw ParseError(0, "matrix must be square with at least 2 rows");
    Eigen::MatrixXd p(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) p(i, j) = rows[i][j];
    if (!is_complementary(p, 1e-9)) throw ParseError(0, "matrix entries must satisfy p(a,b) + p(b,a) = 1");
    if (!is_strength_monotone(p, 1e-9))
        throw ParseError(0, "matrix rows must be ordered by strength (monotone winning probabilities)");
    return WinMatrix(std::move(p));
}

WinMatrix load_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file " + path.string());
    return read_matrix_csv(in);
}

}  // namespace tourney
