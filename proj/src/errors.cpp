#include "lorenzband/errors.hpp"

namespace lorenzband {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::missing_file: return "missing file";
        case ErrorCode::missing_column: return "missing column";
        case ErrorCode::non_numeric: return "non-numeric value";
        case ErrorCode::negative_income: return "negative income";
        case ErrorCode::zero_total: return "zero total";
        case ErrorCode::too_few_rows: return "too few rows";
        case ErrorCode::bad_argument: return "bad argument";
        case ErrorCode::enumeration_cap: return "enumeration cap exceeded";
        case ErrorCode::numerical: return "numerical failure";
    }
    return "unknown error";
}

}  // namespace lorenzband
