#include "locop/errors.hpp"

namespace locop {

void throw_precondition(const std::string& what) { throw PreconditionError(what); }

void throw_numerical(const std::string& what) { throw NumericalError(what); }

}  // namespace locop
