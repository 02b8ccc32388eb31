#pragma once

#include <stdexcept>
#include <string>

namespace ressd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define RESSD_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}  \
    }

// Input-shape and precondition failures.
RESSD_DEFINE_ERROR(DimensionMismatch);
RESSD_DEFINE_ERROR(FieldMismatch);
RESSD_DEFINE_ERROR(InvalidParameters);
RESSD_DEFINE_ERROR(NotPrime);

// Linear algebra.
RESSD_DEFINE_ERROR(Singular);
RESSD_DEFINE_ERROR(RankDeficient);
RESSD_DEFINE_ERROR(NotSystematic);

// Instance transforms.
RESSD_DEFINE_ERROR(NoSuchSubgroup);
RESSD_DEFINE_ERROR(NotSubgroup);
RESSD_DEFINE_ERROR(ZeroScale);
RESSD_DEFINE_ERROR(BadZPrime);
RESSD_DEFINE_ERROR(ContextMismatch);
RESSD_DEFINE_ERROR(EntryOutsideE);

// Solvers and lattices.
RESSD_DEFINE_ERROR(ZTooSmall);
RESSD_DEFINE_ERROR(ListCapExceeded);
RESSD_DEFINE_ERROR(DimensionTooLarge);
RESSD_DEFINE_ERROR(OutputCapExceeded);
RESSD_DEFINE_ERROR(IntegerOverflow);

// Reductions.
RESSD_DEFINE_ERROR(NoParticularSolution);
RESSD_DEFINE_ERROR(TooFar);
RESSD_DEFINE_ERROR(NotInLattice);
RESSD_DEFINE_ERROR(BadAssignment);
RESSD_DEFINE_ERROR(ZeroSyndrome);
RESSD_DEFINE_ERROR(NonIntegerCenter);

// Serialization.
RESSD_DEFINE_ERROR(FormatError);

#undef RESSD_DEFINE_ERROR

}  // namespace ressd
