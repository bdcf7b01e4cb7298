#pragma once

#include <stdexcept>
#include <string>

namespace proxyforge {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define PROXYFORGE_DEFINE_ERROR(Name)            \
    class Name : public Error {                  \
    public:                                      \
        using Error::Error;                      \
    }

// core
PROXYFORGE_DEFINE_ERROR(BudgetExhausted);
PROXYFORGE_DEFINE_ERROR(DimensionMismatch);
PROXYFORGE_DEFINE_ERROR(InvalidClipRange);
PROXYFORGE_DEFINE_ERROR(InvalidProblem);

// problems
PROXYFORGE_DEFINE_ERROR(NonPhysical);
PROXYFORGE_DEFINE_ERROR(UnknownFunctionId);
PROXYFORGE_DEFINE_ERROR(UnknownProblem);

// ela
PROXYFORGE_DEFINE_ERROR(DegenerateSample);
PROXYFORGE_DEFINE_ERROR(EmptyRetention);
PROXYFORGE_DEFINE_ERROR(FeatureMismatch);

// gp
PROXYFORGE_DEFINE_ERROR(NoValidCandidate);
PROXYFORGE_DEFINE_ERROR(ParseError);

// algospace
PROXYFORGE_DEFINE_ERROR(InvalidConfig);

// designer
PROXYFORGE_DEFINE_ERROR(ProposerError);

class ProposerUnavailable : public ProposerError {
public:
    using ProposerError::ProposerError;
};

class MalformedResponse : public ProposerError {
public:
    using ProposerError::ProposerError;
};

#undef PROXYFORGE_DEFINE_ERROR

}  // namespace proxyforge
