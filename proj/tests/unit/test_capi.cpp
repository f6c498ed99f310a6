#include <cmath>
#include <cstring>
#include <string>

#include "doctest.h"
#include "locop/locop.h"

namespace {

const char* kToeplitz = R"({"rows": {"dim": 1, "window": [[0, 3]], "points": [[0], [1], [2], [3]]},
  "cols": {"dim": 1, "window": [[0, 3]], "points": [[0], [1], [2], [3]]},
  "entries": [[0, 0, 3], [0, 1, 1], [1, 0, 1], [1, 1, 3], [1, 2, 1], [2, 1, 1], [2, 2, 3], [2, 3, 1], [3, 2, 1], [3, 3, 3]]})";

}  // namespace

TEST_CASE("matrix handles") {
  locop_matrix* m = nullptr;
  REQUIRE(locop_matrix_parse(kToeplitz, &m) == LOCOP_OK);
  size_t r = 0, c = 0;
  CHECK(locop_matrix_shape(m, &r, &c) == LOCOP_OK);
  CHECK(r == 4);
  CHECK(c == 4);
  double v = 0.0;
  CHECK(locop_matrix_sjostrand_norm(m, &v) == LOCOP_OK);
  CHECK(v == 5.0);
  CHECK(locop_matrix_schur_norm(m, &v) == LOCOP_OK);
  CHECK(v == 5.0);
  int cert = 0;
  CHECK(locop_matrix_lower_constant(m, 2.0, 0, 0, &v, &cert) == LOCOP_OK);
  CHECK(v == doctest::Approx(3.0 - 2.0 * std::cos(M_PI / 5.0)).epsilon(1e-12));
  CHECK(cert == 1);
  CHECK(locop_matrix_upper_constant(m, INFINITY, &v, &cert) == LOCOP_OK);
  CHECK(v == 5.0);
  CHECK(locop_matrix_lower_constant(m, 3.0, 0, 0, &v, &cert) == LOCOP_ERR_PRECONDITION);
  CHECK(std::string(locop_last_error()).find("seed") != std::string::npos);
  CHECK(locop_matrix_lower_constant(m, 3.0, 1, 5, &v, &cert) == LOCOP_OK);
  CHECK(cert == 0);
  locop_matrix_free(m);
}

TEST_CASE("error codes") {
  locop_matrix* m = nullptr;
  CHECK(locop_matrix_load("/nonexistent/m.json", &m) == LOCOP_ERR_PRECONDITION);
  CHECK(m == nullptr);
  CHECK(std::strlen(locop_last_error()) > 0);
  CHECK(locop_matrix_parse("{not json", &m) == LOCOP_ERR_PRECONDITION);
  CHECK(locop_matrix_shape(nullptr, nullptr, nullptr) == LOCOP_ERR_PRECONDITION);
  locop_report* r = nullptr;
  const char* singular = R"({"analysis": "invdecay", "matrix": "s.json"})";
  CHECK(locop_run(singular, "/nonexistent", &r) == LOCOP_ERR_PRECONDITION);
}

TEST_CASE("reports") {
  locop_report* r = nullptr;
  REQUIRE(locop_run(R"({"analysis": "conv", "values": [1, 3, 1], "grid": 4096})", ".", &r) == LOCOP_OK);
  CHECK(std::string(locop_report_json(r)).find("\"verdict\": \"stable\"") != std::string::npos);
  CHECK(locop_report_csv(r) == nullptr);
  locop_report_free(r);
  CHECK(std::string(locop_version()).size() > 0);
}
