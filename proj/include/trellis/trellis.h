/* Trellis engine C API.
 *
 * Strings passed in are UTF-8 and NUL terminated. Strings returned through
 * `char**` out parameters are owned by the caller and released with
 * trellis_string_free. Functions returning int return TRELLIS_OK or an error
 * code; trellis_last_error() then describes the failure on the calling thread.
 */
#ifndef TRELLIS_TRELLIS_H
#define TRELLIS_TRELLIS_H

#include <stdint.h>

#if defined(TRELLIS_BUILDING_LIBRARY)
#define TRELLIS_API __attribute__((visibility("default")))
#else
#define TRELLIS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum trellis_status {
  TRELLIS_OK = 0,
  TRELLIS_UNKNOWN_LANGUAGE = 1,
  TRELLIS_TEMPLATE_ERROR = 2,
  TRELLIS_STALE_SCRIPT = 3,
  TRELLIS_INVALID_ROLLBACK = 4,
  TRELLIS_INVALID_CHANGE = 5,
  TRELLIS_NOTHING_TO_REVERT = 6,
  TRELLIS_FRAGMENT_ORPHANED = 7,
  TRELLIS_NOT_A_LIST = 8,
  TRELLIS_INDEX_OUT_OF_RANGE = 9,
  TRELLIS_CANNOT_DELETE = 10,
  TRELLIS_REPLACE_FAILED = 11,
  TRELLIS_NO_HEURISTIC = 12,
  TRELLIS_UNKNOWN_ACTION = 13,
  TRELLIS_STALE_INSTANCE = 14,
  TRELLIS_NOT_AN_EXPRESSION = 15,
  TRELLIS_UNSUPPORTED_GRAMMAR = 16,
  TRELLIS_BAD_REQUEST = 17,
  TRELLIS_UNKNOWN_SESSION = 18,
  TRELLIS_STALE_VERSION = 19,
  TRELLIS_MALFORMED_MESSAGE = 20,
  TRELLIS_UNKNOWN_NODE = 21,
  TRELLIS_IO = 22,
  TRELLIS_INVALID_ARGUMENT = 98,
  TRELLIS_INTERNAL = 99
};

typedef struct trellis_service trellis_service;
typedef struct trellis_document trellis_document;

TRELLIS_API const char* trellis_version(void);
/* Message of the last failure on this thread; empty when none. */
TRELLIS_API const char* trellis_last_error(void);
/* Symbolic name of a status code, e.g. "StaleVersion". */
TRELLIS_API const char* trellis_error_name(int status);
TRELLIS_API void trellis_string_free(char* s);

/* Protocol service: every request object {"id","method","params"} gets one reply. */
TRELLIS_API trellis_service* trellis_service_new(void);
TRELLIS_API void trellis_service_free(trellis_service* service);
/* Protocol errors are reported inside the reply; the return value only covers
 * argument and allocation failures. */
TRELLIS_API int trellis_service_handle(trellis_service* service, const char* request_json, char** reply_json);
/* Framed protocol on stdin/stdout until EOF. */
TRELLIS_API int trellis_serve_stdio(trellis_service* service);
typedef void (*trellis_ready_fn)(uint16_t bound_port, void* user);
/* Framed protocol on a TCP socket. Blocks. Port 0 picks a free port; `ready`
 * (may be NULL) receives the bound port once the socket listens. */
TRELLIS_API int trellis_serve_tcp(trellis_service* service, const char* host, uint16_t port, trellis_ready_fn ready,
                                  void* user);

/* Runs a replay script. `trace` receives one line per step, `passed` 1 when
 * every assertion held. Either out parameter may be NULL. */
TRELLIS_API int trellis_replay(const char* script_json, char** trace, int* passed);
/* Same, reading the script (and any "file" it names) from disk. */
TRELLIS_API int trellis_replay_file(const char* path, char** trace, int* passed);

/* Edit script between two versions of a document. format 0: one op per line;
 * format 1: JSON. */
TRELLIS_API int trellis_diff(const char* language, const char* old_text, const char* new_text, int format,
                             char** out);

/* One structured edit on `text`. request_json: {"op":"insert|delete|replace|wrap",
 * "at":[from,to], "text", "index", "prefix", "suffix"}. */
TRELLIS_API int trellis_edit(const char* language, const char* text, const char* request_json, char** new_text);

/* Single-document convenience handle over the same protocol. */
TRELLIS_API trellis_document* trellis_document_open(const char* language, const char* text, const char* options_json);
TRELLIS_API void trellis_document_free(trellis_document* document);
TRELLIS_API int trellis_document_state(trellis_document* document, char** state_json);
/* changes_json: [{"from","to","insert"}, ...]. result_json: {outcome, opCount, version, state, ...}. */
TRELLIS_API int trellis_document_change(trellis_document* document, const char* changes_json, int force_apply,
                                        char** result_json);
TRELLIS_API int trellis_document_action(trellis_document* document, uint64_t instance_id, const char* action,
                                        const char* payload_json, char** result_json);
TRELLIS_API int trellis_document_revert(trellis_document* document, char** result_json);

#ifdef __cplusplus
}
#endif

#endif
