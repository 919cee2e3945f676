#include "pfde/pfde.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "arith.hpp"
#include "bhargava.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "runner.hpp"

struct pfde_session {
  pfde::cli::RunConfig config;
};

namespace {

thread_local std::string last_error;

pfde_status status_of(int code) {
  switch (code) {
    case pfde::cli::kComplete: return PFDE_OK;
    case pfde::cli::kPartial: return PFDE_PARTIAL;
    case pfde::cli::kInternalError: return PFDE_ERR_INTERNAL;
    default: return PFDE_ERR_CONFIG;
  }
}

// Runs fn, translating exceptions into a status and last_error.
template <typename Fn>
pfde_status guarded(Fn&& fn) {
  last_error.clear();
  try {
    fn();
    return PFDE_OK;
  } catch (const pfde::Error& e) {
    last_error = std::string(pfde::error_kind_name(e.kind())) + ": " + e.what();
    if (e.kind() == pfde::ErrorKind::Internal) return PFDE_ERR_INTERNAL;
    if (e.kind() == pfde::ErrorKind::Budget) return PFDE_PARTIAL;
    return PFDE_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    last_error = "internal: out of memory";
    return PFDE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = std::string("internal: ") + e.what();
    return PFDE_ERR_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

pfde_status null_argument() {
  last_error = "invalid_argument: null argument";
  return PFDE_ERR_CONFIG;
}

}  // namespace

extern "C" {

const char* pfde_version(void) { return "1.0.0"; }

pfde_session* pfde_session_create(void) {
  try {
    return new pfde_session();
  } catch (...) {
    last_error = "internal: out of memory";
    return nullptr;
  }
}

void pfde_session_destroy(pfde_session* session) { delete session; }

pfde_status pfde_session_set(pfde_session* session, const char* key, const char* value) {
  if (!session || !key || !value) return null_argument();
  return guarded([&] { pfde::cli::apply_option(session->config, key, value); });
}

pfde_status pfde_session_load_config(pfde_session* session, const char* path) {
  if (!session || !path) return null_argument();
  return guarded([&] {
    for (const auto& [k, v] : pfde::cli::read_config_file(path)) pfde::cli::apply_option(session->config, k, v);
  });
}

pfde_status pfde_session_run(pfde_session* session, const char* command, pfde_line_fn sink, void* user) {
  if (!session || !command) return null_argument();
  last_error.clear();
  pfde::cli::LineSink lines = [&](const std::string& s) {
    if (sink) sink(s.c_str(), s.size(), user);
  };
  std::string error;
  const int code = pfde::cli::run_command(command, session->config, lines, error);
  last_error = error;
  return status_of(code);
}

void pfde_request_interrupt(void) { pfde::cli::interrupt_flag().store(true); }
void pfde_clear_interrupt(void) { pfde::cli::interrupt_flag().store(false); }

const char* pfde_last_error(void) { return last_error.c_str(); }

pfde_status pfde_parse_equation(const char* text, char** json_out) {
  if (!text || !json_out) return null_argument();
  return guarded([&] { *json_out = dup(pfde::model::equation_to_json(pfde::model::parse_equation(text)).dump()); });
}

pfde_status pfde_bhargava_factorial(const char* set, uint64_t n, char** decimal_out) {
  if (!set || !decimal_out) return null_argument();
  return guarded([&] {
    *decimal_out = dup(pfde::bhargava::bhargava_factorial(pfde::bhargava::SetSpec::parse(set), n).get_str());
  });
}

pfde_status pfde_radical(const char* decimal, char** decimal_out) {
  if (!decimal || !decimal_out) return null_argument();
  return guarded([&] {
    mpz_class m;
    if (m.set_str(decimal, 10) != 0) pfde::fail(pfde::ErrorKind::InvalidArgument, "not a decimal integer");
    if (m == 0) pfde::fail(pfde::ErrorKind::InvalidArgument, "radical of 0 is undefined");
    *decimal_out = dup(pfde::arith::radical(m).get_str());
  });
}

pfde_status pfde_legendre_valuation(uint64_t n, uint64_t p, char** decimal_out) {
  if (!decimal_out) return null_argument();
  return guarded([&] {
    if (mpz_probab_prime_p(mpz_class(p).get_mpz_t(), 30) == 0) pfde::fail(pfde::ErrorKind::InvalidArgument, "p must be prime");
    *decimal_out = dup(std::to_string(pfde::arith::legendre_valuation(n, p)));
  });
}

void pfde_free(void* p) { std::free(p); }

}  // extern "C"
