#ifndef SLIDESEG_SUBPROCESS_HPP
#define SLIDESEG_SUBPROCESS_HPP

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <string>

namespace slideseg {

/// Child process with line-oriented stdin/stdout, used for external scoring
/// backends. The command line is run through /bin/sh so backends can be
/// scripts with arguments. One request must be answered by exactly one
/// response line, in order.
class LineProcess {
 public:
  explicit LineProcess(const std::string& command) : command_(command) {
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
      throw std::runtime_error("LineProcess: pipe failed: " + std::string(std::strerror(errno)));
    pid_ = fork();
    if (pid_ < 0) throw std::runtime_error("LineProcess: fork failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];
  }

  LineProcess(const LineProcess&) = delete;
  LineProcess& operator=(const LineProcess&) = delete;

  ~LineProcess() {
    close_stdin();
    if (out_fd_ >= 0) close(out_fd_);
    if (pid_ > 0) waitpid(pid_, nullptr, 0);
  }

  void write_line(const std::string& line) {
    std::string payload = line;
    payload.push_back('\n');
    std::size_t off = 0;
    while (off < payload.size()) {
      const ssize_t n = ::write(in_fd_, payload.data() + off, payload.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error("LineProcess: write to '" + command_ +
                                 "' failed: " + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  /// Blocking read of one response line (without the newline).
  std::string read_line() {
    std::string line;
    while (true) {
      const std::size_t nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      char chunk[4096];
      const ssize_t n = ::read(out_fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error("LineProcess: read from '" + command_ +
                                 "' failed: " + std::strerror(errno));
      }
      if (n == 0)
        throw std::runtime_error("LineProcess: '" + command_ +
                                 "' closed its output before responding" + exit_diagnostics());
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void close_stdin() {
    if (in_fd_ >= 0) {
      close(in_fd_);
      in_fd_ = -1;
    }
  }

  /// Close streams and reap; returns the child's exit code.
  int finish() {
    close_stdin();
    if (out_fd_ >= 0) {
      close(out_fd_);
      out_fd_ = -1;
    }
    int status = 0;
    if (pid_ > 0) {
      waitpid(pid_, &status, 0);
      pid_ = -1;
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

 private:
  std::string exit_diagnostics() {
    int status = 0;
    if (pid_ > 0 && waitpid(pid_, &status, WNOHANG) == pid_) {
      pid_ = -1;
      if (WIFEXITED(status))
        return " (exit code " + std::to_string(WEXITSTATUS(status)) + ")";
      if (WIFSIGNALED(status))
        return " (killed by signal " + std::to_string(WTERMSIG(status)) + ")";
    }
    return "";
  }

  std::string command_;
  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  std::string buffer_;
};

}  // namespace slideseg

#endif  // SLIDESEG_SUBPROCESS_HPP
