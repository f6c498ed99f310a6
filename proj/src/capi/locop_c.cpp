#include "locop/locop.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "locop/analysis.hpp"
#include "locop/corpus.hpp"
#include "locop/errors.hpp"
#include "locop/json_io.hpp"
#include "locop/matalg.hpp"
#include "locop/stability.hpp"

struct locop_matrix {
  locop::LocalizedMatrix a;
};

struct locop_report {
  std::string json;
  std::string csv;
  bool has_csv = false;
};

namespace {

thread_local std::string last_error;

template <class F>
locop_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return LOCOP_OK;
  } catch (const locop::PreconditionError& e) {
    last_error = e.what();
    return LOCOP_ERR_PRECONDITION;
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("malformed JSON: ") + e.what();
    return LOCOP_ERR_PRECONDITION;
  } catch (const locop::NumericalError& e) {
    last_error = e.what();
    return LOCOP_ERR_NUMERICAL;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return LOCOP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LOCOP_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  locop::require(p != nullptr, std::string("null argument: ") + what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* locop_version(void) { return "0.1.0"; }

const char* locop_last_error(void) { return last_error.c_str(); }

void locop_string_free(char* s) { std::free(s); }

locop_status locop_matrix_load(const char* path, locop_matrix** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new locop_matrix{locop::io::matrix_from_json(locop::io::read_json_file(path))};
  });
}

locop_status locop_matrix_parse(const char* json_text, locop_matrix** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = new locop_matrix{locop::io::matrix_from_json(locop::io::json::parse(json_text))};
  });
}

void locop_matrix_free(locop_matrix* m) { delete m; }

locop_status locop_matrix_shape(const locop_matrix* m, size_t* rows, size_t* cols) {
  return guarded([&] {
    need(m, "matrix");
    if (rows) *rows = m->a.num_rows();
    if (cols) *cols = m->a.num_cols();
  });
}

locop_status locop_matrix_schur_norm(const locop_matrix* m, double* out) {
  return guarded([&] {
    need(m, "matrix");
    need(out, "out");
    *out = locop::schur_norm(m->a);
  });
}

locop_status locop_matrix_sjostrand_norm(const locop_matrix* m, double* out) {
  return guarded([&] {
    need(m, "matrix");
    need(out, "out");
    *out = locop::sjostrand_norm(m->a);
  });
}

locop_status locop_matrix_lower_constant(const locop_matrix* m, double p, int has_seed, uint64_t seed, double* value,
                                         int* certified) {
  return guarded([&] {
    need(m, "matrix");
    need(value, "value");
    locop::StabilityOptions opts;
    if (has_seed) opts.seed = seed;
    const auto e = locop::lower_constant(m->a, p, opts);
    *value = e.value;
    if (certified) *certified = e.certified ? 1 : 0;
  });
}

locop_status locop_matrix_upper_constant(const locop_matrix* m, double p, double* value, int* certified) {
  return guarded([&] {
    need(m, "matrix");
    need(value, "value");
    const auto e = locop::upper_constant(m->a, p);
    *value = e.value;
    if (certified) *certified = e.certified ? 1 : 0;
  });
}

locop_status locop_run(const char* config_json, const char* base_dir, locop_report** out) {
  return guarded([&] {
    need(config_json, "config_json");
    need(out, "out");
    const auto result = locop::run_analysis(locop::io::json::parse(config_json), base_dir ? base_dir : ".");
    auto* r = new locop_report;
    r->json = locop::io::dump(result.report);
    if (result.csv) {
      r->csv = *result.csv;
      r->has_csv = true;
    }
    *out = r;
  });
}

const char* locop_report_json(const locop_report* r) { return r ? r->json.c_str() : nullptr; }

const char* locop_report_csv(const locop_report* r) { return r && r->has_csv ? r->csv.c_str() : nullptr; }

void locop_report_free(locop_report* r) { delete r; }

locop_status locop_generate(const char* request_json, const char* out_dir, char** manifest_json) {
  return guarded([&] {
    need(request_json, "request_json");
    need(out_dir, "out_dir");
    const auto manifest = locop::corpus::generate(locop::io::json::parse(request_json), out_dir);
    if (manifest_json) *manifest_json = dup_string(locop::io::dump(manifest));
  });
}

locop_status locop_write_file(const char* path, const char* data, size_t size) {
  return guarded([&] {
    need(path, "path");
    need(data, "data");
    locop::io::write_file_atomic(path, std::string(data, size));
  });
}

}  // extern "C"
