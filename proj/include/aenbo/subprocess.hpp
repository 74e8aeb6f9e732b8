#ifndef AENBO_SUBPROCESS_HPP
#define AENBO_SUBPROCESS_HPP
#pragma once

#include <json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <limits>
#include <mutex>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "aenbo/errors.hpp"

namespace aenbo {

/// The request line for x, newline included: {"x":[0.1,0.2]}
inline std::string objective_request(const Eigen::VectorXd& x) {
    nlohmann::json j;
    j["x"] = std::vector<double>(x.data(), x.data() + x.size());
    return j.dump() + "\n";
}

/// Parses a response line holding one decimal number. "nan" and "inf" parse
/// to non-finite values; anything else non-numeric is rejected.
inline bool parse_objective_response(const std::string& line, double& value) {
    const auto b = line.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return false;
    const auto e = line.find_last_not_of(" \t\r\n");
    const std::string t = line.substr(b, e - b + 1);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) return false;
    value = v;
    return true;
}

struct CommandOutcome {
    bool ok = false;
    double value = std::numeric_limits<double>::quiet_NaN();
    /// Empty when ok.
    std::string error;
};

/// Runs `command` under /bin/sh, writes `request` to its stdin, and reads the
/// first line of its stdout. The child runs in its own process group, which
/// is killed on timeout.
inline CommandOutcome run_objective_command(const std::string& command, const std::string& request,
                                            double timeout_secs) {
    static std::once_flag ignore_sigpipe;
    std::call_once(ignore_sigpipe, [] { std::signal(SIGPIPE, SIG_IGN); });

    CommandOutcome out;
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0) return {false, out.value, std::string("pipe failed: ") + std::strerror(errno)};
    if (pipe(from_child) != 0) {
        close(to_child[0]);
        close(to_child[1]);
        return {false, out.value, std::string("pipe failed: ") + std::strerror(errno)};
    }
    const pid_t pid = fork();
    if (pid < 0) {
        for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) close(fd);
        return {false, out.value, std::string("fork failed: ") + std::strerror(errno)};
    }
    if (pid == 0) {
        setpgid(0, 0);
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) close(fd);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    setpgid(pid, pid);
    close(to_child[0]);
    close(from_child[1]);

    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + std::chrono::duration<double>(timeout_secs);
    bool timed_out = false;

    std::size_t written = 0;
    while (written < request.size()) {
        const ssize_t w = write(to_child[1], request.data() + written, request.size() - written);
        if (w < 0) {
            if (errno == EINTR) continue;
            break;
        }
        written += static_cast<std::size_t>(w);
    }
    close(to_child[1]);

    std::string buffer;
    char chunk[4096];
    for (;;) {
        if (buffer.find('\n') != std::string::npos) break;
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
        if (left <= 0) {
            timed_out = true;
            break;
        }
        pollfd pfd{from_child[0], POLLIN, 0};
        const int r = poll(&pfd, 1, static_cast<int>(std::min<long long>(left, 1000)));
        if (r < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (r == 0) continue;
        const ssize_t n = read(from_child[0], chunk, sizeof chunk);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
    }
    close(from_child[0]);

    int status = 0;
    if (timed_out) {
        kill(-pid, SIGKILL);
        waitpid(pid, &status, 0);
        out.error = "timed out after " + std::to_string(timeout_secs) + " s";
        return out;
    }
    // The answer is in; give the child until the deadline to exit.
    for (;;) {
        const pid_t w = waitpid(pid, &status, WNOHANG);
        if (w == pid) break;
        if (w < 0 && errno != EINTR) break;
        if (clock::now() >= deadline) {
            kill(-pid, SIGKILL);
            waitpid(pid, &status, 0);
            out.error = "timed out waiting for exit after " + std::to_string(timeout_secs) + " s";
            return out;
        }
        usleep(1000);
    }
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        out.error = WIFEXITED(status) ? "exited with status " + std::to_string(WEXITSTATUS(status))
                                      : "terminated by signal " + std::to_string(WTERMSIG(status));
        return out;
    }
    const std::string line = buffer.substr(0, buffer.find('\n'));
    double v = 0.0;
    if (!parse_objective_response(line, v)) {
        out.error = "non-numeric response '" + line + "'";
        return out;
    }
    out.value = v;
    out.ok = std::isfinite(v);
    if (!out.ok) out.error = "non-finite response '" + line + "'";
    return out;
}

/// Objective backed by an external command. Failed evaluations return NaN
/// (which the BO loop clips); `max_consecutive` failures in a row throw
/// ExternalAbortError.
class ExternalObjective {
public:
    ExternalObjective(std::string command, double timeout_secs, int max_consecutive = 3)
        : command_(std::move(command)), timeout_(timeout_secs), max_consecutive_(max_consecutive) {}

    double operator()(const Eigen::VectorXd& x) {
        const CommandOutcome r = run_objective_command(command_, objective_request(x), timeout_);
        points_.push_back(x);
        values_.push_back(r.value);
        errors_.push_back(r.error);
        if (r.ok) {
            consecutive_ = 0;
            return r.value;
        }
        ++failures_;
        ++consecutive_;
        std::cerr << "[aenbo] objective evaluation " << errors_.size() - 1 << " failed: " << r.error << "\n";
        if (consecutive_ >= max_consecutive_)
            throw ExternalAbortError("objective failed " + std::to_string(consecutive_) + " times in a row; last: " +
                                     r.error);
        return std::numeric_limits<double>::quiet_NaN();
    }

    /// One entry per evaluation, empty for successes.
    [[nodiscard]] const std::vector<std::string>& errors() const { return errors_; }
    [[nodiscard]] const std::vector<Eigen::VectorXd>& points() const { return points_; }
    /// Raw responses; NaN where nothing numeric came back.
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] int failures() const { return failures_; }

private:
    std::string command_;
    double timeout_;
    int max_consecutive_;
    int consecutive_ = 0;
    int failures_ = 0;
    std::vector<Eigen::VectorXd> points_;
    std::vector<double> values_;
    std::vector<std::string> errors_;
};

} // namespace aenbo

#endif // AENBO_SUBPROCESS_HPP
