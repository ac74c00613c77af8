#pragma once

#include "ecve/estimator.hpp"

#include <string>

namespace ecve {

/// JSON document for a fit. Doubles are written in shortest round-trip
/// form, so loading restores every matrix entry bit for bit.
std::string fit_to_json(const EcveFit &fit);
/// Throws ParseError on malformed or incomplete documents.
EcveFit fit_from_json(const std::string &text);

void save_fit(const std::string &path, const EcveFit &fit);
EcveFit load_fit(const std::string &path);

} // namespace ecve
