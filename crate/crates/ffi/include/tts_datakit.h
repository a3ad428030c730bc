#ifndef TTS_DATAKIT_H
#define TTS_DATAKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum TtscStatus {
  TTSC_STATUS_OK = 0,
  TTSC_STATUS_NULL_POINTER = 1,
  TTSC_STATUS_INVALID_UTF8 = 2,
  // The language config could not be read or is invalid.
  TTSC_STATUS_CONFIG_ERROR = 3,
  // The sentence was rejected; the rejection is in the output JSON.
  TTSC_STATUS_REJECTED = 4,
  // A WAV file could not be read or decoded.
  TTSC_STATUS_AUDIO_ERROR = 5,
  // The signal could not be measured (too short, silent, ...).
  TTSC_STATUS_METRIC_ERROR = 6,
  TTSC_STATUS_DUPLICATE_ID = 7,
  TTSC_STATUS_PANIC = 8,
} TtscStatus;

// Loaded language definition.
typedef struct TtscLanguage TtscLanguage;

// Accumulating syllable and phone counts.
typedef struct TtscStats TtscStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static string.
const char *ttsc_version(void);

// Message for the last failed call on this thread, or null. Valid until the
// next call into the library on this thread.
const char *ttsc_last_error_message(void);

// Loads a language definition file.
//
// # Safety
// `path` is a NUL-terminated string; `out` is valid for a pointer write.
enum TtscStatus ttsc_language_load(const char *path, struct TtscLanguage **out);

// Parses a language definition from TOML text.
//
// # Safety
// `text` is a NUL-terminated string; `out` is valid for a pointer write.
enum TtscStatus ttsc_language_from_toml(const char *text, struct TtscLanguage **out);

// # Safety
// `lang` is null or a handle from `ttsc_language_load` not yet freed.
void ttsc_language_free(struct TtscLanguage *lang);

// Analyzes one sentence. On success `out_json` receives the sentence
// record; on `TTSC_STATUS_REJECTED` it receives the rejection.
//
// # Safety
// `lang` is a live handle; `id` and `text` are NUL-terminated strings;
// `out_json` is valid for a pointer write.
enum TtscStatus ttsc_analyze_sentence(const struct TtscLanguage *lang,
                                      const char *id,
                                      const char *text,
                                      bool strict,
                                      char **out_json);

// Number of aksharas in `text` (strict analysis).
//
// # Safety
// `lang` is a live handle; `text` is a NUL-terminated string; `out` is
// valid for a write.
enum TtscStatus ttsc_syllable_count(const struct TtscLanguage *lang, const char *text, size_t *out);

// Mel-cepstral distortion in dB between two WAV files, with default
// analysis settings.
//
// # Safety
// Paths are NUL-terminated strings; `out_db` is valid for a write.
enum TtscStatus ttsc_mcd_wav(const char *reference_path,
                             const char *synthesized_path,
                             double *out_db);

// Quality-checks one recording against its transcript with default
// thresholds; `out_json` receives the report. Problems with the file are
// reported inside the JSON, not as a failing status.
//
// # Safety
// `lang` is a live handle; strings are NUL-terminated; `out_json` is valid
// for a pointer write.
enum TtscStatus ttsc_qc_wav(const struct TtscLanguage *lang,
                            const char *utt_id,
                            const char *wav_path,
                            const char *transcript,
                            bool strict,
                            char **out_json);

struct TtscStats *ttsc_stats_new(void);

// Analyzes `text` (strict) and adds it to the counts.
//
// # Safety
// `stats` and `lang` are live handles; `id` and `text` are NUL-terminated.
enum TtscStatus ttsc_stats_add_sentence(struct TtscStats *stats,
                                        const struct TtscLanguage *lang,
                                        const char *id,
                                        const char *text);

// The `k` weakest phones as a JSON array of `{phone, count, sentences}`.
//
// # Safety
// `stats` is a live handle; `out_json` is valid for a pointer write.
enum TtscStatus ttsc_stats_weak_phones_json(const struct TtscStats *stats,
                                            size_t k,
                                            char **out_json);

// # Safety
// `stats` is null or a handle from `ttsc_stats_new` not yet freed.
void ttsc_stats_free(struct TtscStats *stats);

// # Safety
// `s` is null or a string returned by this library not yet freed.
void ttsc_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TTS_DATAKIT_H */
