/* Exercises the C interface end to end. */
#include <quasispec/quasispec.h>

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                          \
  do {                                                                        \
    if (!(cond)) {                                                            \
      fprintf(stderr, "%s:%d: expected %s (%s)\n", __FILE__, __LINE__, #cond, \
              qs_last_error());                                               \
      ++failures;                                                             \
    }                                                                         \
  } while (0)

static void log_line(const char* line, void* user) {
  (void)line;
  ++*(int*)user;
}

static void frequencies(void) {
  qs_frequency* g = NULL;
  EXPECT(qs_frequency_from_real("golden", 12, 256, &g) == QS_OK);
  EXPECT(qs_frequency_depth(g) == 12);
  char* q = NULL;
  EXPECT(qs_frequency_q(g, 12, &q) == QS_OK);
  EXPECT(q && strcmp(q, "233") == 0);
  qs_string_free(q);
  char* p = NULL;
  EXPECT(qs_frequency_p(g, 12, &p) == QS_OK);
  EXPECT(p && strcmp(p, "144") == 0);
  qs_string_free(p);
  double lq = 0;
  EXPECT(qs_frequency_log_q(g, 10, &lq) == QS_OK);
  EXPECT(fabs(lq - log(89.0)) < 1e-12);
  EXPECT(qs_frequency_log_q(g, 40, &lq) == QS_ERR_INSUFFICIENT_DEPTH);
  double beta = 0;
  EXPECT(qs_frequency_beta(g, 1, 1, &beta) == QS_OK);
  EXPECT(fabs(beta - log(2.0)) < 1e-12);
  char* js = NULL;
  EXPECT(qs_frequency_to_json(g, &js) == QS_OK);
  EXPECT(js && strstr(js, "\"233\"") != NULL);
  qs_string_free(js);
  qs_frequency_free(g);

  const char* coeffs[] = {"1", "2", "3"};
  qs_frequency* c = NULL;
  EXPECT(qs_frequency_from_coefficients(coeffs, 3, &c) == QS_OK);
  EXPECT(qs_frequency_q(c, 3, &q) == QS_OK);
  EXPECT(q && strcmp(q, "10") == 0);
  qs_string_free(q);
  qs_frequency_free(c);

  const char* bad[] = {"1", "x"};
  qs_frequency* b = NULL;
  EXPECT(qs_frequency_from_coefficients(bad, 2, &b) == QS_ERR_INVALID_ARGUMENT);
  EXPECT(b == NULL);
  EXPECT(strlen(qs_last_error()) > 0);

  qs_frequency* l = NULL;
  EXPECT(qs_frequency_liouville(1.0, 4, 1u << 22, &l) == QS_OK);
  EXPECT(qs_frequency_q(l, 1, &q) == QS_OK);
  EXPECT(q && strcmp(q, "3") == 0);
  qs_string_free(q);
  qs_frequency_free(l);
  EXPECT(qs_frequency_from_real("golden", 5, 256, NULL) == QS_ERR_INVALID_ARGUMENT);
}

static void potentials(void) {
  qs_potential* md = NULL;
  EXPECT(qs_potential_builtin("maryland-like", 0, 0.0, &md) == QS_OK);
  double f, g, v;
  int singular = 0;
  EXPECT(qs_potential_eval(md, 0.25, &f, &g, &v, &singular) == QS_OK);
  EXPECT(!singular);
  EXPECT(fabs(v - 1.0) < 1e-12);
  EXPECT(qs_potential_eval(md, 0.5, &f, &g, &v, &singular) == QS_OK);
  EXPECT(singular);
  double m = 0;
  EXPECT(qs_potential_mean_log_f(md, &m) == QS_OK);
  EXPECT(fabs(m + log(2.0)) < 1e-6);
  qs_potential* n = NULL;
  EXPECT(qs_potential_normalize(md, &n) == QS_OK);
  EXPECT(qs_potential_mean_log_f(n, &m) == QS_OK);
  EXPECT(fabs(m) < 1e-8);
  char* js = NULL;
  EXPECT(qs_potential_to_json(md, &js) == QS_OK);
  qs_potential* back = NULL;
  EXPECT(qs_potential_from_json(js, &back) == QS_OK);
  qs_string_free(js);
  EXPECT(qs_potential_eval(back, 0.25, &f, &g, &v, &singular) == QS_OK);
  EXPECT(fabs(v - 1.0) < 1e-12);
  qs_potential_free(back);
  qs_potential_free(n);
  qs_potential_free(md);

  qs_potential* none = NULL;
  EXPECT(qs_potential_builtin("nonesuch", 0, 0.0, &none) == QS_ERR_UNKNOWN_NAME);
  EXPECT(strcmp(qs_status_name(QS_ERR_UNKNOWN_NAME), "unknown-name") == 0);
  EXPECT(qs_potential_builtin("example2", 1, 2.0, &none) == QS_ERR_INVALID_ARGUMENT);
}

static void cocycle(void) {
  qs_frequency* g = NULL;
  qs_potential* free_spec = NULL;
  qs_potential* md = NULL;
  qs_potential* mdn = NULL;
  EXPECT(qs_frequency_from_real("golden", 30, 256, &g) == QS_OK);
  EXPECT(qs_potential_builtin("free", 0, 0.0, &free_spec) == QS_OK);
  EXPECT(qs_potential_builtin("maryland-like", 0, 0.0, &md) == QS_OK);
  EXPECT(qs_potential_normalize(md, &mdn) == QS_OK);

  double L = -1, se = -1;
  EXPECT(qs_lyapunov(free_spec, g, 0.5, 2000, QS_PHASE_AVERAGE, 4, QS_KIND_A, &L, &se) == QS_OK);
  EXPECT(fabs(L) < 1e-2);
  EXPECT(qs_lyapunov(free_spec, g, 3.0, 2000, QS_PHASE_AVERAGE, 4, QS_KIND_A, &L, &se) == QS_OK);
  EXPECT(fabs(L - acosh(1.5)) < 1e-2);
  EXPECT(qs_lyapunov(md, g, 0.0, 2000, QS_PHASE_AVERAGE, 4, QS_KIND_D, &L, &se) == QS_ERR_INVALID_ARGUMENT);
  EXPECT(qs_lyapunov(mdn, g, 0.0, 2000, QS_PHASE_AVERAGE, 4, QS_KIND_D, &L, &se) == QS_OK);
  EXPECT(L > 0);

  char* js = NULL;
  EXPECT(qs_delta_index(g, md, 0.5, 10, 0.05, &js) == QS_ERR_THETA_IN_SINGULAR_TUBE);
  EXPECT(js == NULL);
  EXPECT(qs_delta_index(g, md, 0.3, 20, 0.05, &js) == QS_OK);
  EXPECT(js && strstr(js, "selected_subsequence") != NULL);
  qs_string_free(js);

  const double phi[2] = {1.0, 0.0};
  js = NULL;
  EXPECT(qs_gordon_check(free_spec, g, 1.0 / 7.0, 0.0, 6, 0.05, 0.0, phi, &js) == QS_OK);
  EXPECT(js && strstr(js, "conclusion_max") != NULL);
  qs_string_free(js);
  const double tall[2] = {2.0, 0.0};
  EXPECT(qs_gordon_check(free_spec, g, 1.0 / 7.0, 0.0, 6, 0.05, 0.0, tall, &js) == QS_ERR_INVALID_ARGUMENT);

  qs_potential_free(mdn);
  qs_potential_free(md);
  qs_potential_free(free_spec);
  qs_frequency_free(g);
}

static void probes(void) {
  qs_frequency* g = NULL;
  qs_potential* free_spec = NULL;
  EXPECT(qs_frequency_from_real("golden", 30, 256, &g) == QS_OK);
  EXPECT(qs_potential_builtin("free", 0, 0.0, &free_spec) == QS_OK);
  qs_probe* p = NULL;
  EXPECT(qs_probe_create(free_spec, g, 0.0, 1, &p) == QS_OK);
  EXPECT(qs_probe_size(p) == 3);
  double e = 0, w = 0, total = 0;
  for (size_t k = 0; k < qs_probe_size(p); ++k) {
    EXPECT(qs_probe_level(p, k, &e, &w) == QS_OK);
    total += w;
  }
  EXPECT(fabs(total - 1.0) < 1e-12);
  EXPECT(qs_probe_level(p, 3, &e, &w) == QS_ERR_INVALID_ARGUMENT);
  qs_probe_free(p);

  const double loc[] = {0.0, 1.0};
  const double wt[] = {1.0, 1.0};
  qs_probe* m = NULL;
  EXPECT(qs_probe_from_measure(loc, wt, 2, &m) == QS_OK);
  double re = 0, im = 0;
  EXPECT(qs_probe_borel(m, 0.0, 0.1, &re, &im) == QS_OK);
  /* m(z) = sum w / (x - z) at z = 0.1 i */
  EXPECT(fabs(im - (5.0 + 0.5 * 0.1 / 1.01)) < 1e-12);
  EXPECT(fabs(re - 0.5 / 1.01) < 1e-12);
  double gs = -1, pk = 0;
  EXPECT(qs_probe_dimension(m, 0.0, 1e-2, 0.5, 12, &gs, &pk) == QS_OK);
  EXPECT(gs >= 0.0 && gs <= 0.05);
  qs_probe_free(m);

  qs_potential_free(free_spec);
  qs_frequency_free(g);
}

static void experiments(void) {
  qs_experiment* exp = NULL;
  char* violations = NULL;
  EXPECT(qs_experiment_parse("{\"task\":\"cf\",\"bogus\":1}", NULL, &exp, &violations) == QS_ERR_CONFIG);
  EXPECT(exp == NULL);
  EXPECT(violations && strstr(violations, "unknown-key") != NULL);
  EXPECT(violations && strstr(violations, "missing-parameter") != NULL);
  qs_string_free(violations);

  const char* cfg =
      "{\"task\":\"cf\",\"frequency\":\"golden\",\"depth\":8,\"output\":\"capi_test_out/golden\"}";
  EXPECT(qs_experiment_parse(cfg, "cf", &exp, &violations) == QS_OK);
  EXPECT(violations == NULL);
  int code = -1, lines = 0;
  char* report = NULL;
  EXPECT(qs_experiment_run(exp, 1, log_line, &lines, &code, &report) == QS_OK);
  EXPECT(code == 0);
  EXPECT(report && strstr(report, "golden.cf.json") != NULL);
  qs_string_free(report);
  qs_experiment_free(exp);

  FILE* fp = fopen("capi_test_out/golden.cf.json", "rb");
  EXPECT(fp != NULL);
  if (fp) fclose(fp);
}

int main(void) {
  EXPECT(strlen(qs_version()) > 0);
  EXPECT(qs_random_theta(9) == qs_random_theta(9));
  EXPECT(qs_random_theta(9) != qs_random_theta(10));
  frequencies();
  potentials();
  cocycle();
  probes();
  experiments();
  if (failures) {
    fprintf(stderr, "%d failures\n", failures);
    return 1;
  }
  printf("capi ok\n");
  return 0;
}
