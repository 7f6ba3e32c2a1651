#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "regionlab/csv.hpp"
#include "regionlab/error.hpp"
#include "regionlab/geometry.hpp"
#include "regionlab/jsonio.hpp"

namespace regionlab {

// ---------------------------------------------------------------------------
// Education grades
// ---------------------------------------------------------------------------

enum class EducationGrade {
    Uneducated,
    Kindergarten,
    PreElementary,
    Elementary,
    JuniorHigh,
    SeniorHigh,
    Vocational,
    Bachelor,
    PostGraduate,
};

inline constexpr int kEducationGradeCount = 9;

/// Estimated years of education for each grade.
inline int education_years(EducationGrade grade) {
    switch (grade) {
    case EducationGrade::Uneducated: return 0;
    case EducationGrade::Kindergarten: return 0;
    case EducationGrade::PreElementary: return 3;
    case EducationGrade::Elementary: return 6;
    case EducationGrade::JuniorHigh: return 9;
    case EducationGrade::SeniorHigh: return 12;
    case EducationGrade::Vocational: return 14;
    case EducationGrade::Bachelor: return 16;
    case EducationGrade::PostGraduate: return 19;
    }
    fail("unknown education grade");
}

inline const char* education_label(EducationGrade grade) {
    switch (grade) {
    case EducationGrade::Uneducated: return "Uneducated";
    case EducationGrade::Kindergarten: return "Kindergarten";
    case EducationGrade::PreElementary: return "Pre-elementary school";
    case EducationGrade::Elementary: return "Elementary school";
    case EducationGrade::JuniorHigh: return "Junior high school";
    case EducationGrade::SeniorHigh: return "Senior high school";
    case EducationGrade::Vocational: return "Vocational degree";
    case EducationGrade::Bachelor: return "Bachelor degree";
    case EducationGrade::PostGraduate: return "Post-graduate";
    }
    fail("unknown education grade");
}

inline EducationGrade parse_education_grade(const std::string& label) {
    for (int g = 0; g < kEducationGradeCount; ++g) {
        const auto grade = static_cast<EducationGrade>(g);
        if (label == education_label(grade))
            return grade;
    }
    fail("unknown education grade label '", label, "'");
}

// ---------------------------------------------------------------------------
// Households
// ---------------------------------------------------------------------------

struct HouseholdRecord {
    std::string province;
    double monthly_income = 0.0; // currency / month
    EducationGrade education_grade = EducationGrade::Uneducated;
    bool has_savings = false;
    double yearly_savings = 0.0; // currency / year
    bool formal_debt = false;
    bool alcohol = false;
    bool smoking = false;
};

// ---------------------------------------------------------------------------
// Poverty factors
// ---------------------------------------------------------------------------

enum class FactorAspect { Education, Income, Inequality, Debt, LivingAspect, Other };

inline const char* aspect_label(FactorAspect aspect) {
    switch (aspect) {
    case FactorAspect::Education: return "Education";
    case FactorAspect::Income: return "Income";
    case FactorAspect::Inequality: return "Inequality";
    case FactorAspect::Debt: return "Debt";
    case FactorAspect::LivingAspect: return "Living aspect";
    case FactorAspect::Other: return "Other";
    }
    return "Other";
}

/// polarity +1: intrinsically positive factor; -1: intrinsically negative.
struct Factor {
    std::string name;
    FactorAspect aspect = FactorAspect::Other;
    int polarity = 1;
};

/// The nine province-level poverty factors, in canonical column order.
inline const std::vector<Factor>& poverty_factors() {
    static const std::vector<Factor> factors = {
        {"years_of_education", FactorAspect::Education, +1},
        {"monthly_income", FactorAspect::Income, +1},
        {"yearly_savings", FactorAspect::Income, +1},
        {"pct_without_savings", FactorAspect::Income, -1},
        {"income_ratio_20_20", FactorAspect::Inequality, -1},
        {"gini_index", FactorAspect::Inequality, -1},
        {"pct_formal_debt", FactorAspect::Debt, -1},
        {"pct_alcohol", FactorAspect::LivingAspect, -1},
        {"pct_smoking", FactorAspect::LivingAspect, -1},
    };
    return factors;
}

inline Factor factor_metadata(const std::string& name) {
    for (const Factor& factor : poverty_factors())
        if (factor.name == name)
            return factor;
    return Factor{name, FactorAspect::Other, +1};
}

/// Province-by-factor matrix plus factor metadata. Row order matches the
/// geometry order used to build the spatial weights.
struct FeatureTable {
    std::vector<ProvinceId> provinces;
    std::vector<Factor> factors;
    Eigen::MatrixXd values; // n x p

    std::size_t column(const std::string& name) const {
        for (std::size_t j = 0; j < factors.size(); ++j)
            if (factors[j].name == name)
                return j;
        fail("feature table has no column '", name, "'");
    }

    std::vector<double> column_values(std::size_t j) const {
        std::vector<double> out(static_cast<std::size_t>(values.rows()));
        for (Eigen::Index i = 0; i < values.rows(); ++i)
            out[static_cast<std::size_t>(i)] = values(i, static_cast<Eigen::Index>(j));
        return out;
    }
};

inline void validate(const FeatureTable& table) {
    require(table.values.rows() >= 3, "feature table needs at least 3 provinces");
    require(static_cast<std::size_t>(table.values.rows()) == table.provinces.size(),
            "feature table row/province mismatch");
    require(static_cast<std::size_t>(table.values.cols()) == table.factors.size(),
            "feature table column/factor mismatch");
    std::vector<std::string> names;
    for (const Factor& factor : table.factors)
        names.push_back(factor.name);
    std::sort(names.begin(), names.end());
    require(std::adjacent_find(names.begin(), names.end()) == names.end(),
            "duplicate factor column names");
    require(table.values.allFinite(), "feature table contains missing values");
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

/// Gini index under the population mean-absolute-difference formula
/// G = sum_ij |y_i - y_j| / (2 n^2 ybar). Values are summed in sorted
/// order, so the result does not depend on record order.
inline double gini_index(std::vector<double> incomes) {
    require(!incomes.empty(), "gini of empty range");
    std::sort(incomes.begin(), incomes.end());
    const std::size_t n = incomes.size();
    double total = 0.0;
    double weighted = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        total += incomes[k];
        weighted += (2.0 * static_cast<double>(k) - static_cast<double>(n) + 1.0) * incomes[k];
    }
    if (total == 0.0)
        return 0.0;
    const double mean_income = total / static_cast<double>(n);
    return weighted / (static_cast<double>(n) * static_cast<double>(n) * mean_income);
}

/// Mean income of the top quintile over the bottom quintile; quintile size
/// is ceil(n/5) of the sorted incomes.
inline double income_ratio_20_20(std::vector<double> incomes, const std::string& province) {
    require(!incomes.empty(), "ratio 20:20 of empty range");
    std::sort(incomes.begin(), incomes.end());
    const std::size_t n = incomes.size();
    const std::size_t q = (n + 4) / 5;
    double bottom = 0.0;
    double top = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        bottom += incomes[i];
        top += incomes[n - q + i];
    }
    require(bottom > 0.0, "province '", province,
            "': bottom quintile income is zero, ratio 20:20 undefined");
    return top / bottom;
}

/// Aggregates household records to the nine province-level poverty factors.
/// Provinces gives the output row order; every record must join one of them.
inline FeatureTable aggregate_households(std::span<const HouseholdRecord> records,
                                         const std::vector<ProvinceId>& provinces) {
    std::map<std::string, std::vector<std::size_t>> by_province;
    for (std::size_t i = 0; i < provinces.size(); ++i) {
        require(by_province.emplace(provinces[i].id, std::vector<std::size_t>{}).second,
                "duplicate province id '", provinces[i].id, "'");
    }
    for (std::size_t r = 0; r < records.size(); ++r) {
        auto it = by_province.find(records[r].province);
        require(it != by_province.end(), "household record ", r, " references unknown province '",
                records[r].province, "'");
        it->second.push_back(r);
    }

    FeatureTable table;
    table.provinces = provinces;
    table.factors = poverty_factors();
    table.values.resize(static_cast<Eigen::Index>(provinces.size()), 9);

    auto sorted_mean = [](std::vector<double> values) {
        std::sort(values.begin(), values.end());
        return std::accumulate(values.begin(), values.end(), 0.0) /
               static_cast<double>(values.size());
    };

    for (std::size_t p = 0; p < provinces.size(); ++p) {
        const auto& members = by_province.at(provinces[p].id);
        require(!members.empty(), "province '", provinces[p].id, "' has zero household records");
        const double n = static_cast<double>(members.size());

        std::vector<double> incomes;
        std::vector<double> savings_of_savers;
        long years_total = 0;
        std::size_t without_savings = 0;
        std::size_t with_debt = 0;
        std::size_t with_alcohol = 0;
        std::size_t with_smoking = 0;
        for (std::size_t r : members) {
            const HouseholdRecord& record = records[r];
            require(record.monthly_income >= 0.0, "province '", provinces[p].id,
                    "': negative monthly income");
            require(record.yearly_savings >= 0.0, "province '", provinces[p].id,
                    "': negative yearly savings");
            incomes.push_back(record.monthly_income);
            years_total += education_years(record.education_grade);
            if (record.has_savings)
                savings_of_savers.push_back(record.yearly_savings);
            else
                ++without_savings;
            if (record.formal_debt)
                ++with_debt;
            if (record.alcohol)
                ++with_alcohol;
            if (record.smoking)
                ++with_smoking;
        }

        const Eigen::Index row = static_cast<Eigen::Index>(p);
        table.values(row, 0) = static_cast<double>(years_total) / n;
        table.values(row, 1) = sorted_mean(incomes);
        // Households without savings are excluded from the savings mean.
        table.values(row, 2) =
            savings_of_savers.empty() ? 0.0 : sorted_mean(savings_of_savers);
        table.values(row, 3) = 100.0 * static_cast<double>(without_savings) / n;
        table.values(row, 4) = income_ratio_20_20(incomes, provinces[p].id);
        table.values(row, 5) = gini_index(incomes);
        table.values(row, 6) = 100.0 * static_cast<double>(with_debt) / n;
        table.values(row, 7) = 100.0 * static_cast<double>(with_alcohol) / n;
        table.values(row, 8) = 100.0 * static_cast<double>(with_smoking) / n;
    }
    return table;
}

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

inline std::vector<HouseholdRecord> load_household_csv(const std::string& path) {
    const CsvTable csv = read_csv(path);
    const std::size_t c_province = csv.column("province_id");
    const std::size_t c_income = csv.column("monthly_income");
    const std::size_t c_grade = csv.column("education_grade");
    const std::size_t c_has_savings = csv.column("has_savings");
    const std::size_t c_savings = csv.column("yearly_savings");
    const std::size_t c_debt = csv.column("formal_debt");
    const std::size_t c_alcohol = csv.column("alcohol");
    const std::size_t c_smoking = csv.column("smoking");
    std::vector<HouseholdRecord> records;
    records.reserve(csv.rows.size());
    for (const auto& row : csv.rows) {
        HouseholdRecord record;
        record.province = row[c_province];
        record.monthly_income = parse_double(row[c_income], "monthly_income");
        record.education_grade = parse_education_grade(row[c_grade]);
        record.has_savings = parse_bool(row[c_has_savings], "has_savings");
        record.yearly_savings = parse_double(row[c_savings], "yearly_savings");
        record.formal_debt = parse_bool(row[c_debt], "formal_debt");
        record.alcohol = parse_bool(row[c_alcohol], "alcohol");
        record.smoking = parse_bool(row[c_smoking], "smoking");
        records.push_back(std::move(record));
    }
    return records;
}

/// Reads a province-level attribute CSV: province_id, optional name, and
/// one numeric column per factor.
inline FeatureTable load_feature_csv(const std::string& path) {
    const CsvTable csv = read_csv(path);
    const std::size_t c_id = csv.column("province_id");
    const bool has_name = csv.has_column("name");
    const std::size_t c_name = has_name ? csv.column("name") : 0;

    FeatureTable table;
    std::vector<std::size_t> value_columns;
    for (std::size_t j = 0; j < csv.header.size(); ++j) {
        if (j == c_id || (has_name && j == c_name))
            continue;
        table.factors.push_back(factor_metadata(csv.header[j]));
        value_columns.push_back(j);
    }
    require(!value_columns.empty(), "'", path, "': no factor columns");

    table.values.resize(static_cast<Eigen::Index>(csv.rows.size()),
                        static_cast<Eigen::Index>(value_columns.size()));
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
        const auto& row = csv.rows[i];
        table.provinces.push_back(ProvinceId{row[c_id], has_name ? row[c_name] : row[c_id]});
        for (std::size_t j = 0; j < value_columns.size(); ++j)
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                parse_double(row[value_columns[j]], csv.header[value_columns[j]]);
    }
    validate(table);
    return table;
}

inline void write_feature_csv(const std::string& path, const FeatureTable& table) {
    std::ofstream out(path);
    require(out.good(), "cannot open '", path, "' for writing");
    out << "province_id,name";
    for (const Factor& factor : table.factors)
        out << ',' << csv_quote(factor.name);
    out << '\n';
    for (std::size_t i = 0; i < table.provinces.size(); ++i) {
        out << csv_quote(table.provinces[i].id) << ',' << csv_quote(table.provinces[i].name);
        for (Eigen::Index j = 0; j < table.values.cols(); ++j)
            out << ',' << format12(table.values(static_cast<Eigen::Index>(i), j));
        out << '\n';
    }
}

inline void write_household_csv(const std::string& path,
                                std::span<const HouseholdRecord> records) {
    std::ofstream out(path);
    require(out.good(), "cannot open '", path, "' for writing");
    out << "province_id,monthly_income,education_grade,has_savings,yearly_savings,"
           "formal_debt,alcohol,smoking\n";
    for (const HouseholdRecord& record : records) {
        out << csv_quote(record.province) << ',' << format12(record.monthly_income) << ','
            << csv_quote(education_label(record.education_grade)) << ','
            << (record.has_savings ? 1 : 0) << ',' << format12(record.yearly_savings) << ','
            << (record.formal_debt ? 1 : 0) << ',' << (record.alcohol ? 1 : 0) << ','
            << (record.smoking ? 1 : 0) << '\n';
    }
}

/// Reorders attribute rows to match the geometry order; every attribute row
/// must join exactly one geometry feature and vice versa.
inline FeatureTable align_to_geometry(const FeatureTable& table,
                                      const std::vector<RegionGeometry>& geometries) {
    require(table.provinces.size() == geometries.size(), "attribute table has ",
            table.provinces.size(), " provinces, geometry has ", geometries.size());
    std::map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < table.provinces.size(); ++i)
        require(row_of.emplace(table.provinces[i].id, i).second,
                "duplicate attribute row for province '", table.provinces[i].id, "'");
    FeatureTable aligned;
    aligned.factors = table.factors;
    aligned.values.resize(table.values.rows(), table.values.cols());
    for (std::size_t g = 0; g < geometries.size(); ++g) {
        auto it = row_of.find(geometries[g].id.id);
        require(it != row_of.end(), "no attribute row for province '", geometries[g].id.id, "'");
        aligned.provinces.push_back(table.provinces[it->second]);
        aligned.values.row(static_cast<Eigen::Index>(g)) =
            table.values.row(static_cast<Eigen::Index>(it->second));
    }
    return aligned;
}

} // namespace regionlab
