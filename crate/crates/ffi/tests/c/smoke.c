#include <stdio.h>
#include <string.h>
#include "arcfillet.h"

#define CHECK(call)                                                        \
  do {                                                                     \
    AfStatus st_ = (call);                                                 \
    if (st_ != AF_STATUS_OK) {                                             \
      fprintf(stderr, "%s -> %d: %s\n", #call, (int)st_, af_last_error()); \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(void) {
  AfGrid *grid = NULL;
  AfPath *path = NULL;
  AfSmoothed *smooth = NULL;
  char *text = NULL;
  size_t arcs = 0;
  double len = 0.0;

  CHECK(af_grid_builtin_complex(&grid));
  CHECK(af_plan(grid, 3.5, 3.5, 47.5, 36.5, 1000, 5.0, 1, 0.5, &path));
  CHECK(af_smooth(path, grid, 1e-6, &smooth));
  CHECK(af_smoothed_arc_count(smooth, &arcs));
  CHECK(af_smoothed_length(smooth, &len));
  CHECK(af_smoothed_to_text(smooth, &text));
  printf("arcs=%zu length=%.3f first=%c\n", arcs, len, text[0]);
  af_string_free(text);

  if (af_plan(grid, 0.5, 0.5, 47.5, 36.5, 100, 5.0, 1, 0.5, &path) != AF_STATUS_PLACEMENT)
    return 2;
  if (af_last_error() == NULL || strstr(af_last_error(), "start") == NULL)
    return 3;

  af_smoothed_free(smooth);
  af_path_free(path);
  af_grid_free(grid);
  return 0;
}
