#include "incrcert/serialization.hpp"

namespace incrcert {

nlohmann::json matrix_to_nested(const Matrix& m) {
    auto rows = nlohmann::json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_nested(const nlohmann::json& j) {
    detail::require(j.is_array(), "matrix_from_nested: expected an array of rows");
    const Index rows = static_cast<Index>(j.size());
    if (rows == 0) return Matrix(0, 0);
    const Index cols = static_cast<Index>(j.at(0).size());
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        detail::require(static_cast<Index>(row.size()) == cols,
                        "matrix_from_nested: ragged rows");
        for (Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

void to_json(nlohmann::json& j, const SupplyQSR& s) {
    j = nlohmann::json{{"Q", matrix_to_nested(s.Q)},
                       {"S", matrix_to_nested(s.S)},
                       {"R", matrix_to_nested(s.R)}};
}

void from_json(const nlohmann::json& j, SupplyQSR& s) {
    s.Q = matrix_from_nested(j.at("Q"));
    s.S = matrix_from_nested(j.at("S"));
    s.R = matrix_from_nested(j.at("R"));
}

}  // namespace incrcert
