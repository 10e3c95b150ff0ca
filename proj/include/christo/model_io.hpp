#pragma once

#include <filesystem>
#include <iosfwd>

#include "christo/classifier.hpp"

namespace christo {

/// Model files are line-oriented text. The first line is the format tag
/// `christo-model <version>`; key/value header lines follow, then one block per class:
///
///   christo-model 1
///   basis plain <n> <t>
///   classes <m>
///   weighting uniform|prior
///   policy rel:<v>|tikhonov:<v>
///   rng <generator name>
///   seed <u64>
///   dataset-hash <hex u64>
///   reject none|<float>
///   center <n floats>
///   scale <n floats>
///   class <j> rank <r> support <N_j>
///   mass <float>
///   threshold <float>
///   gamma <float>
///   eigenvalues <r floats>
///   eigenvector <s(t) floats>      (r lines)
///   end
///
/// Every float is written as a C99 hexadecimal literal, so loading reproduces each stored
/// double bit for bit and scores of a reloaded model are identical to the original's.
inline constexpr int kModelFormatVersion = 1;

void save_model(const ClassifierModel& model, std::ostream& out);
void save_model(const ClassifierModel& model, const std::filesystem::path& path);

/// Throws DataError on a malformed or unsupported file.
ClassifierModel load_model(std::istream& in, const std::string& source = "<model>");
ClassifierModel load_model(const std::filesystem::path& path);

}  // namespace christo
