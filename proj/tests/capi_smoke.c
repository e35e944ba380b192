/* Compiles the public header as C and exercises a short end-to-end path. */
#include <math.h>
#include <stdio.h>

#include "erdiff/erdiff.h"

int main(void) {
  const char* keys[] = {"a", "sigma"};
  const double vals[] = {1.0, 0.5};
  erd_model* model = NULL;
  erd_graph* graph = NULL;
  erd_run* run = NULL;
  double init[50];
  double s_n[64];
  erd_sim_config cfg = erd_sim_config_default();
  size_t i;

  if (erd_model_builtin("linear_attract", keys, vals, 2, &model) != ERD_OK) {
    fprintf(stderr, "model: %s\n", erd_last_error());
    return 1;
  }
  if (erd_graph_sample(50, 0.3, 1, 1, &graph) != ERD_OK) return 1;
  for (i = 0; i < 50; ++i) init[i] = -1.0 + 2.0 * ((double)i + 0.5) / 50.0;
  cfg.dt = 0.01;
  cfg.T = 0.5;
  cfg.store_stride = 10;
  if (erd_simulate(model, graph, init, 50, &cfg, &run) != ERD_OK) {
    fprintf(stderr, "simulate: %s\n", erd_last_error());
    return 1;
  }
  if (erd_run_stored(run) != 6) return 1;
  if (erd_run_s_n(run, s_n) != ERD_OK) return 1;
  for (i = 1; i < erd_run_stored(run); ++i)
    if (s_n[i] < s_n[i - 1] || !isfinite(s_n[i])) return 1;
  if (erd_simulate(NULL, graph, init, 50, &cfg, &run) != ERD_ERR_ARGUMENT) return 1;
  erd_run_free(run);
  erd_graph_free(graph);
  erd_model_free(model);
  printf("capi smoke ok (%s)\n", erd_version());
  return 0;
}
