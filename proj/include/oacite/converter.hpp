#pragma once

// External document-to-text converter: a shell command template run once
// per document, with a hard timeout.
//
// Template placeholders:
//   {path}    temp file holding the document bytes (otherwise bytes go to stdin)
//   {format}  format tag (pdf, ps, latex, xml, rtf, word)
// Stdout is taken as UTF-8 text; a nonzero exit status is a failure.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <cerrno>
#include <cstring>
#include <optional>
#include <string>
#include <string_view>

#include "oacite/extract.hpp"

namespace oacite {

inline constexpr const char* kConverterEnvVar = "OACITE_CONVERTER";

class ExternalConverter final : public TextConverter {
 public:
  explicit ExternalConverter(std::string command_template,
                             std::chrono::milliseconds timeout = std::chrono::seconds(30))
      : template_(std::move(command_template)), timeout_(timeout) {}

  // Reads the template from OACITE_CONVERTER; nullopt when unset or empty.
  static std::optional<ExternalConverter> from_environment(
      std::chrono::milliseconds timeout = std::chrono::seconds(30)) {
    const char* v = std::getenv(kConverterEnvVar);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return ExternalConverter(v, timeout);
  }

  const std::string& command_template() const noexcept { return template_; }

  Expected<std::string, ExtractError> convert(std::string_view bytes,
                                              Format format) const override {
    TempFile input;
    if (!input.create(bytes))
      return unexpected(ExtractError{"CONVERTER_FAILED", "cannot create temp file"});

    const bool path_arg = template_.find("{path}") != std::string::npos;
    std::string cmd = substitute(template_, "{path}", shell_quote(input.path));
    cmd = substitute(cmd, "{format}", std::string(to_string(format)));
    return run(cmd, path_arg ? -1 : input.fd);
  }

 private:
  struct TempFile {
    std::string path;
    int fd = -1;

    bool create(std::string_view bytes) {
      const char* dir = std::getenv("TMPDIR");
      std::string pattern = std::string(dir && *dir ? dir : "/tmp") + "/oacite-conv-XXXXXX";
      fd = ::mkostemp(pattern.data(), O_CLOEXEC);
      if (fd < 0) return false;
      path = pattern;
      std::size_t off = 0;
      while (off < bytes.size()) {
        ssize_t n = ::write(fd, bytes.data() + off, bytes.size() - off);
        if (n <= 0) return false;
        off += static_cast<std::size_t>(n);
      }
      return ::lseek(fd, 0, SEEK_SET) == 0;
    }

    ~TempFile() {
      if (fd >= 0) ::close(fd);
      if (!path.empty()) ::unlink(path.c_str());
    }
  };

  static std::string substitute(std::string s, std::string_view key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = s.find(key, pos)) != std::string::npos) {
      s.replace(pos, key.size(), value);
      pos += value.size();
    }
    return s;
  }

  static std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
      if (c == '\'') out += "'\\''";
      else out.push_back(c);
    }
    out += "'";
    return out;
  }

  Expected<std::string, ExtractError> run(const std::string& cmd, int stdin_fd) const {
    int out_pipe[2];
    if (::pipe2(out_pipe, O_CLOEXEC) != 0)
      return unexpected(ExtractError{"CONVERTER_FAILED", std::strerror(errno)});

    const pid_t pid = ::fork();
    if (pid < 0) {
      ::close(out_pipe[0]);
      ::close(out_pipe[1]);
      return unexpected(ExtractError{"CONVERTER_FAILED", "fork failed"});
    }
    if (pid == 0) {
      ::setpgid(0, 0);
      int in = stdin_fd >= 0 ? stdin_fd : ::open("/dev/null", O_RDONLY);
      ::dup2(in, STDIN_FILENO);
      ::dup2(out_pipe[1], STDOUT_FILENO);
      int devnull = ::open("/dev/null", O_WRONLY);
      if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
      ::execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(out_pipe[1]);

    std::string output;
    bool timed_out = false;
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    char buf[65536];
    for (;;) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) {
        timed_out = true;
        break;
      }
      pollfd pfd{out_pipe[0], POLLIN, 0};
      int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (rc < 0 && errno == EINTR) continue;
      if (rc == 0) {
        timed_out = true;
        break;
      }
      ssize_t n = ::read(out_pipe[0], buf, sizeof buf);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      output.append(buf, static_cast<std::size_t>(n));
    }
    ::close(out_pipe[0]);
    if (timed_out) ::kill(-pid, SIGKILL);

    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (timed_out)
      return unexpected(ExtractError{"CONVERTER_TIMEOUT",
                                     "converter exceeded " + std::to_string(timeout_.count()) +
                                         " ms"});
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
      return unexpected(ExtractError{
          "CONVERTER_FAILED",
          "converter exited with status " +
              std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1)});
    return output;
  }

  std::string template_;
  std::chrono::milliseconds timeout_;
};

}  // namespace oacite
