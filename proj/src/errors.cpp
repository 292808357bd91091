#include "cloe/errors.hpp"

#include <sstream>
#include <utility>

namespace cloe {

namespace {

std::string pole_message(double omega)
{
    std::ostringstream os;
    os.precision(17);
    os << "singular pencil at omega = " << omega;
    return os.str();
}

std::string parse_message(const std::string& what, std::size_t line, const std::string& field)
{
    std::ostringstream os;
    os << what;
    if (line > 0) os << " (line " << line << ")";
    if (!field.empty()) os << " [field '" << field << "']";
    return os.str();
}

} // namespace

SingularPencil::SingularPencil(double omega) : Error(pole_message(omega)), omega_(omega) {}

SingularPencil::SingularPencil(double omega, const std::string& what) : Error(what), omega_(omega) {}

ParseError::ParseError(const std::string& what, std::size_t line, std::string field)
    : Error(parse_message(what, line, field)), line_(line), field_(std::move(field))
{
}

} // namespace cloe
