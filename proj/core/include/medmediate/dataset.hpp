// Columnar dataset with role-tagged variables.
//
// A Dataset is immutable after construction and safe to share across
// parallel workers without synchronization.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace medmediate {

enum class MediatorKind { Binary, Continuous };

std::string to_string(MediatorKind kind);
std::optional<MediatorKind> mediator_kind_from_string(const std::string& text);

/// Which variables play which role. Mediator order is meaningful: it fixes
/// the labeling of path-specific effects.
struct Schema {
    std::string outcome;
    std::string exposure;
    std::vector<std::pair<std::string, MediatorKind>> mediators;
    std::vector<std::string> covariates;
};

class Dataset {
  public:
    /// Builds a dataset from columns. Columns are stored in schema order:
    /// outcome, exposure, mediators, covariates. Lenient: invariants are
    /// reported by validate(), not enforced here, so tests can construct
    /// deliberately broken instances.
    Dataset(Schema schema, std::vector<std::vector<double>> columns,
            std::size_t n_dropped_rows = 0);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_mediators() const { return schema_.mediators.size(); }
    std::size_t n_covariates() const { return schema_.covariates.size(); }
    const Schema& schema() const { return schema_; }

    /// Rows removed at ingestion because of missing values.
    std::size_t n_dropped_rows() const { return n_dropped_; }

    const std::vector<double>& outcome() const { return columns_[0]; }
    const std::vector<double>& exposure() const { return columns_[1]; }
    const std::vector<double>& mediator(std::size_t k) const { return columns_[2 + k]; }
    const std::vector<double>& covariate(std::size_t j) const {
        return columns_[2 + schema_.mediators.size() + j];
    }
    MediatorKind mediator_kind(std::size_t k) const { return schema_.mediators[k].second; }

    /// Row indices ordered by lexicographic comparison of row contents.
    /// Estimators evaluate in this order, which makes every point estimate
    /// invariant under row permutations of the input.
    std::vector<std::size_t> canonical_row_order() const;

    /// Dataset restricted to the given rows (with repetition allowed);
    /// used by bootstrap resampling.
    Dataset subset(const std::vector<std::size_t>& rows) const;

    /// Dataset with the two mediators swapped (labels and kinds). Requires
    /// exactly two mediators.
    Dataset swap_mediators() const;

  private:
    Schema schema_;
    std::vector<std::vector<double>> columns_;
    std::size_t n_rows_;
    std::size_t n_dropped_;
};

/// Maps column names to roles for CSV ingestion.
struct RoleSpec {
    std::string outcome;
    std::string exposure;
    std::vector<std::pair<std::string, MediatorKind>> mediators;
    std::vector<std::string> covariates;
};

/// Reads an RFC 4180 CSV file (header row required). Rows with a missing
/// value in any role-tagged column are dropped and counted; columns not
/// named in the role spec are ignored. Throws DataError on malformed input
/// or invariant violations.
Dataset load_csv(const std::string& path, const RoleSpec& roles);

/// Writes the dataset back to CSV, full double precision. load_csv on the
/// result reproduces the values bit for bit.
void save_csv(const Dataset& ds, const std::string& path);

/// Returns human-readable descriptions of every violated invariant
/// (empty means the dataset conforms). Never throws; pure.
std::vector<std::string> validate(const Dataset& ds);

}  // namespace medmediate
