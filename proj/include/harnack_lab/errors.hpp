#pragma once

#include <stdexcept>
#include <string>

namespace harnack {

struct TooCoarse : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidBox : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonFiniteInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonPositiveShiftedField : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedDim : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidExponent : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LinearSolveFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PositivityLoss : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CheckpointMissing : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SupBoundViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DriftNotZero : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DriftUnboundedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DriftMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MassNotUnit : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RadiusTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConstantNotCertified : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace harnack
