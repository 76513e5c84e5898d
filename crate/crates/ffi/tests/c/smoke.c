#include <stdio.h>
#include <string.h>

#include "waypath.h"

int main(int argc, char **argv) {
  if (argc < 2) return 2;
  double theta = 0.0;
  if (wp_theta_single(110.0, 0.0, 100.0, 10.0, &theta) != WP_STATUS_OK || theta < 44.99 || theta > 45.01)
    return 3;

  char line[64];
  size_t written = 0;
  if (wp_wire_encode(WP_MESSAGE_KIND_THETA, theta, NULL, line, sizeof line, &written) != WP_STATUS_OK ||
      strcmp(line, "THETA 45.000000\n") != 0)
    return 4;

  WpScenario *scenario = NULL;
  if (wp_scenario_load(argv[1], &scenario) != WP_STATUS_OK) {
    char msg[256];
    wp_last_error(msg, sizeof msg, NULL);
    fprintf(stderr, "%s\n", msg);
    return 5;
  }
  WpMission *mission = NULL;
  WpOutcome outcome;
  double elapsed, length;
  if (wp_mission_run(scenario, &mission) != WP_STATUS_OK ||
      wp_mission_summary(mission, &outcome, &elapsed, &length) != WP_STATUS_OK)
    return 6;
  printf("outcome=%d path=%.1f\n", (int)outcome, length);
  wp_mission_free(mission);
  wp_scenario_free(scenario);
  return outcome == WP_OUTCOME_DONE ? 0 : 7;
}
