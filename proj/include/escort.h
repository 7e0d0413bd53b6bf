/* C API for the escort planning library.
 *
 * All entry points return esc_status; on failure a human-readable message is
 * available from esc_last_error() until the next call on the same thread.
 * Configurations are opaque handles created with esc_config_create() and
 * released with esc_config_destroy().
 */
#ifndef ESCORT_H
#define ESCORT_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum esc_status {
  ESC_OK = 0,
  ESC_ERR_CONFIG = 1,
  ESC_ERR_RUNTIME = 2
} esc_status;

typedef struct esc_config esc_config;

const char* esc_version(void);

/* Thread-local message describing the most recent failure. */
const char* esc_last_error(void);

/* Configuration with built-in defaults (the reference scenario). */
esc_config* esc_config_create(void);
void esc_config_destroy(esc_config* cfg);

/* Load a sectioned key/value config file over the current values. */
esc_status esc_config_load_file(esc_config* cfg, const char* path);
esc_status esc_config_load_string(esc_config* cfg, const char* text);

/* Override one value, e.g. esc_config_set(cfg, "cem.n_samples", "64"). */
esc_status esc_config_set(esc_config* cfg, const char* key, const char* value);

esc_status esc_config_validate(const esc_config* cfg);

/* Resolved configuration as JSON; free with esc_string_free(). */
char* esc_config_dump_json(const esc_config* cfg);
void esc_string_free(char* s);

/* Runs one episode; writes episode.jsonl and manifest.json under out_dir. */
esc_status esc_run_episode(const esc_config* cfg, const char* out_dir);

/* Runs a paired batch over comma-separated variants and escort counts;
 * writes batch.csv and manifest.json under out_dir. */
esc_status esc_run_batch(const esc_config* cfg, const char* variants,
                         const char* escort_counts, int n_envs, int workers,
                         const char* out_dir);

/* Replays a logged episode through the dynamics and verifies it matches. */
esc_status esc_replay(const char* log_path);

#ifdef __cplusplus
}
#endif

#endif /* ESCORT_H */
