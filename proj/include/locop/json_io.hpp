#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "locop/kernelop.hpp"
#include "locop/lattice.hpp"
#include "locop/matalg.hpp"
#include "locop/profile.hpp"
#include "locop/stability.hpp"
#include "locop/synthesis.hpp"

namespace locop::io {

using nlohmann::json;

json to_json(const Box& b);
Box box_from_json(const json& j);

// {"dim": d, "window": [[lo, hi], …], "points": [[x_1, …, x_d], …]}
json to_json(const IndexSet& s);
IndexSet index_set_from_json(const json& j);

// {"rows": <IndexSet>, "cols": <IndexSet>, "entries": [[i, j, value], …]}
json to_json(const LocalizedMatrix& a);
LocalizedMatrix matrix_from_json(const json& j);

json to_json(const Profile1D& p);
Profile1D profile_from_json(const json& j);

json to_json(const ModulusBound& m);
json to_json(const GeneratorFamily& f);
GeneratorFamily family_from_json(const json& j);

json to_json(const KernelOperator& k);
KernelOperator kernel_from_json(const json& j);

// Norm indices as JSON: numbers, with ∞ written as the string "inf".
json norm_index_json(double p);
double norm_index_from_json(const json& j);

// Shortest decimal that round-trips the double ("inf", "-inf", "nan" for
// non-finite values).
std::string format_double(double v);

// Two-space indented dump with a trailing newline.
std::string dump(const json& j);

json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// Columns k_1, …, k_d, sup_value; one row per offset in lexicographic order.
std::string offset_profile_csv(const OffsetProfile& profile, std::size_t dim);

// Either one value per field (centred, odd length) or "j,value" lines.
FiniteSequence sequence_from_csv(const std::string& text);

}  // namespace locop::io
