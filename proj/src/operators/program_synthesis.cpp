#include "common.hpp"

#include <adp/table_io.hpp>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace adp {

namespace {

struct TempFile {
    std::filesystem::path path;
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
};

auto make_script_file(std::string_view script) -> std::filesystem::path {
    static std::mt19937_64 rng{std::random_device{}()};
    static std::mutex rng_mutex;
    std::uint64_t tag = 0;
    {
        std::lock_guard lock(rng_mutex);
        tag = rng();
    }
    auto path = std::filesystem::temp_directory_path() / ("adp_script_" + std::to_string(tag));
    std::ofstream out(path, std::ios::binary);
    out << script;
    if (!out) throw ops::OpFailure("cannot write script file", "backend io");
    return path;
}

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

} // namespace

SubprocessBackend::SubprocessBackend(std::vector<std::string> command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
    if (command_.empty()) throw Error("script backend command is empty");
}

auto SubprocessBackend::encode_inputs(const std::vector<Table>& inputs) -> std::string {
    std::string out;
    for (const auto& t : inputs) {
        out += "--- table: " + t.name() + "\n";
        out += to_csv(t);
    }
    return out;
}

auto SubprocessBackend::run(std::string_view script, const std::vector<Table>& inputs) -> Table {
    std::lock_guard lock(mutex_);
    TempFile file{make_script_file(script)};
    const std::string payload = encode_inputs(inputs);

    int in_pipe[2];
    int out_pipe[2];
    if (::pipe(in_pipe) != 0) throw ops::OpFailure("pipe failed", "backend io");
    if (::pipe(out_pipe) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw ops::OpFailure("pipe failed", "backend io");
    }

    std::vector<std::string> argv_store = command_;
    argv_store.push_back(file.path.string());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    argv.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) throw ops::OpFailure("fork failed", "backend io");
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        const int devnull = ::open("/dev/null", O_WRONLY);
        if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::setpgid(0, 0);
        ::execvp(argv[0], argv.data());
        ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    int to_child = in_pipe[1];
    const int from_child = out_pipe[0];
    set_nonblocking(to_child);
    set_nonblocking(from_child);
    ::signal(SIGPIPE, SIG_IGN);

    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    std::size_t written = 0;
    std::string output;
    bool timed_out = false;
    bool out_open = true;
    if (payload.empty()) {
        ::close(to_child);
        to_child = -1;
    }
    while (out_open) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            timed_out = true;
            break;
        }
        pollfd fds[2];
        int n = 0;
        fds[n++] = {from_child, POLLIN, 0};
        if (to_child >= 0) fds[n++] = {to_child, POLLOUT, 0};
        const int rc = ::poll(fds, static_cast<nfds_t>(n), static_cast<int>(left.count()));
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (rc == 0) continue;
        if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
            char buf[65536];
            const ssize_t got = ::read(from_child, buf, sizeof buf);
            if (got > 0) {
                output.append(buf, static_cast<std::size_t>(got));
            } else if (got == 0 || (errno != EAGAIN && errno != EINTR)) {
                out_open = false;
            }
        }
        if (to_child >= 0 && n > 1 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
            const ssize_t put = ::write(to_child, payload.data() + written, payload.size() - written);
            if (put > 0) written += static_cast<std::size_t>(put);
            if (put < 0 && errno != EAGAIN && errno != EINTR) written = payload.size();
            if (written >= payload.size()) {
                ::close(to_child);
                to_child = -1;
            }
        }
    }
    if (to_child >= 0) ::close(to_child);
    ::close(from_child);

    int status = 0;
    if (timed_out) {
        ::kill(-pid, SIGKILL);
        ::kill(pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        throw ops::OpFailure("script timed out after " + std::to_string(timeout_.count()) + " ms", "timeout");
    }
    // stdout closed; give the child the remaining budget to exit
    while (true) {
        const pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (r < 0 && errno != EINTR) break;
        if (std::chrono::steady_clock::now() >= deadline) {
            ::kill(-pid, SIGKILL);
            ::kill(pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            throw ops::OpFailure("script timed out after " + std::to_string(timeout_.count()) + " ms", "timeout");
        }
        ::usleep(1000);
    }
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
        throw ops::OpFailure("script exited with status " + std::to_string(code), "nonzero exit");
    }
    try {
        return parse_csv(output, "output");
    } catch (const Error& e) {
        throw ops::OpFailure(std::string("malformed output table: ") + e.what(), "malformed output");
    }
}

namespace ops {

auto exec_program_synthesis(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx)
    -> std::vector<Table> {
    std::vector<Table> inputs;
    for (const auto& name : op.names("tables")) inputs.push_back(require_table(state, name));
    if (!ctx.script_backend) throw OpFailure("backend disabled", "backend disabled");
    Table out = ctx.script_backend->run(op.text("func"), inputs);
    return {out.renamed(op.text("target"))};
}

} // namespace ops

} // namespace adp
