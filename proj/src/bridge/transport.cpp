#include "saci/bridge/transport.hpp"

#include <algorithm>
#include <arpa/inet.h>
#include <csignal>
#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

namespace saci::bridge {

namespace {

[[noreturn]] void fail(const std::string& what)
{
    throw TransportError(what + ": " + std::strerror(errno));
}

// Waits for `events` on `fd`; false on timeout.
bool wait_fd(int fd, short events, std::chrono::steady_clock::time_point deadline, bool forever)
{
    for (;;) {
        int ms = -1;
        if (!forever) {
            const auto left = std::chrono::duration_cast<Millis>(
                deadline - std::chrono::steady_clock::now());
            ms = static_cast<int>(std::max<Millis::rep>(left.count(), 0));
        }
        pollfd p{fd, events, 0};
        const int rc = ::poll(&p, 1, ms);
        if (rc > 0) {
            return true;
        }
        if (rc == 0) {
            return false;
        }
        if (errno != EINTR) {
            fail("poll");
        }
    }
}

std::optional<std::string> take_line(std::string& buffer)
{
    const auto nl = buffer.find('\n');
    if (nl == std::string::npos) {
        return std::nullopt;
    }
    std::string line = buffer.substr(0, nl);
    buffer.erase(0, nl + 1);
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

void check_line(const std::string& line)
{
    if (line.find('\n') != std::string::npos) {
        throw TransportError("line contains a newline");
    }
}

} // namespace

FdTransport::FdTransport(int in_fd, int out_fd, bool owns)
    : in_fd_(in_fd), out_fd_(out_fd), owns_(owns)
{
}

FdTransport::~FdTransport()
{
    close();
}

void FdTransport::send_line(const std::string& line)
{
    check_line(line);
    if (out_fd_ < 0) {
        throw TransportError("send on a closed transport");
    }
    std::string data = line;
    data.push_back('\n');
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::send(out_fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n < 0 && errno == ENOTSOCK) {
            const ssize_t w = ::write(out_fd_, data.data() + off, data.size() - off);
            if (w < 0) {
                if (errno == EINTR) {
                    continue;
                }
                fail("write");
            }
            off += static_cast<std::size_t>(w);
            continue;
        }
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            fail("send");
        }
        off += static_cast<std::size_t>(n);
    }
}

std::optional<std::string> FdTransport::recv_line(Millis timeout)
{
    const bool forever = timeout.count() < 0;
    const auto deadline = std::chrono::steady_clock::now() + (forever ? Millis{0} : timeout);
    for (;;) {
        if (auto line = take_line(buffer_)) {
            return line;
        }
        if (eof_ || in_fd_ < 0) {
            return std::nullopt;
        }
        if (buffer_.size() > kMaxLineBytes) {
            throw TransportError("incoming line exceeds the size limit");
        }
        if (!wait_fd(in_fd_, POLLIN, deadline, forever)) {
            throw TimeoutError("no reply within " + std::to_string(timeout.count()) + " ms");
        }
        char chunk[4096];
        const ssize_t n = ::read(in_fd_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) {
                continue;
            }
            if (errno == ECONNRESET) {
                eof_ = true;
                continue;
            }
            fail("read");
        }
        if (n == 0) {
            // a final unterminated line is dropped: the peer died mid-message
            eof_ = true;
            buffer_.clear();
            continue;
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

void FdTransport::close()
{
    if (owns_) {
        if (in_fd_ >= 0) {
            ::close(in_fd_);
        }
        if (out_fd_ >= 0 && out_fd_ != in_fd_) {
            ::close(out_fd_);
        }
    }
    in_fd_ = -1;
    out_fd_ = -1;
}

namespace {

struct Channel {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<std::string> lines;
    bool closed = false;
};

class LoopbackTransport : public Transport {
public:
    LoopbackTransport(std::shared_ptr<Channel> in, std::shared_ptr<Channel> out)
        : in_(std::move(in)), out_(std::move(out))
    {
    }

    ~LoopbackTransport() override { close(); }

    void send_line(const std::string& line) override
    {
        check_line(line);
        {
            std::lock_guard lock(out_->mutex);
            if (out_->closed) {
                throw TransportError("send on a closed transport");
            }
            out_->lines.push_back(line);
        }
        out_->ready.notify_all();
    }

    std::optional<std::string> recv_line(Millis timeout) override
    {
        std::unique_lock lock(in_->mutex);
        const auto has_data = [&] { return !in_->lines.empty() || in_->closed; };
        if (timeout.count() < 0) {
            in_->ready.wait(lock, has_data);
        } else if (!in_->ready.wait_for(lock, timeout, has_data)) {
            throw TimeoutError("no reply within " + std::to_string(timeout.count()) + " ms");
        }
        if (in_->lines.empty()) {
            return std::nullopt;
        }
        std::string line = std::move(in_->lines.front());
        in_->lines.pop_front();
        return line;
    }

    void close() override
    {
        for (auto* ch : {in_.get(), out_.get()}) {
            {
                std::lock_guard lock(ch->mutex);
                ch->closed = true;
            }
            ch->ready.notify_all();
        }
    }

private:
    std::shared_ptr<Channel> in_;
    std::shared_ptr<Channel> out_;
};

class ProcessTransport : public FdTransport {
public:
    ProcessTransport(int in_fd, int out_fd, pid_t pid) : FdTransport(in_fd, out_fd, true), pid_(pid)
    {
    }

    ~ProcessTransport() override
    {
        FdTransport::close();
        int status = 0;
        // give the child a moment to exit on EOF before forcing it
        for (int i = 0; i < 50; ++i) {
            if (::waitpid(pid_, &status, WNOHANG) != 0) {
                return;
            }
            ::usleep(20000);
        }
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
    }

private:
    pid_t pid_;
};

} // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_loopback_pair()
{
    auto a_to_b = std::make_shared<Channel>();
    auto b_to_a = std::make_shared<Channel>();
    return {std::make_unique<LoopbackTransport>(b_to_a, a_to_b),
            std::make_unique<LoopbackTransport>(a_to_b, b_to_a)};
}

std::unique_ptr<Transport> tcp_connect(const std::string& host, std::uint16_t port, Millis timeout)
{
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
        throw TransportError("cannot resolve " + host + ": " + ::gai_strerror(rc));
    }
    std::string last_error = "no addresses";
    for (auto* ai = res; ai != nullptr; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_NONBLOCK, ai->ai_protocol);
        if (fd < 0) {
            continue;
        }
        int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
        if (rc < 0 && errno == EINPROGRESS) {
            const auto deadline = std::chrono::steady_clock::now() + timeout;
            if (wait_fd(fd, POLLOUT, deadline, timeout.count() < 0)) {
                int err = 0;
                socklen_t len = sizeof err;
                ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
                rc = err == 0 ? 0 : -1;
                errno = err;
            } else {
                errno = ETIMEDOUT;
            }
        }
        if (rc == 0) {
            ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) & ~O_NONBLOCK);
            const int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            ::freeaddrinfo(res);
            return std::make_unique<FdTransport>(fd, fd, true);
        }
        last_error = std::strerror(errno);
        ::close(fd);
    }
    ::freeaddrinfo(res);
    throw TransportError("cannot connect to " + host + ":" + service + ": " + last_error);
}

TcpListener::TcpListener(std::uint16_t port, const std::string& host)
{
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) {
        fail("socket");
    }
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw TransportError("invalid listen address " + host);
    }
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
        ::listen(fd_, 4) < 0) {
        const int err = errno;
        ::close(fd_);
        errno = err;
        fail("cannot listen on " + host + ":" + std::to_string(port));
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener()
{
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

std::unique_ptr<Transport> TcpListener::accept(Millis timeout)
{
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    if (!wait_fd(fd_, POLLIN, deadline, timeout.count() < 0)) {
        throw TimeoutError("no client connected");
    }
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) {
        fail("accept");
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return std::make_unique<FdTransport>(fd, fd, true);
}

std::unique_ptr<Transport> spawn_process(const std::vector<std::string>& argv)
{
    if (argv.empty()) {
        throw TransportError("empty command");
    }
    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) < 0) {
        fail("pipe");
    }
    if (::pipe2(from_child, O_CLOEXEC) < 0) {
        ::close(to_child[0]);
        ::close(to_child[1]);
        fail("pipe");
    }
    std::vector<char*> args;
    for (const auto& a : argv) {
        args.push_back(const_cast<char*>(a.c_str()));
    }
    args.push_back(nullptr);
    const pid_t pid = ::fork();
    if (pid < 0) {
        fail("fork");
    }
    if (pid == 0) {
        ::dup2(to_child[0], STDIN_FILENO);
        ::dup2(from_child[1], STDOUT_FILENO);
        ::execvp(args[0], args.data());
        ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    return std::make_unique<ProcessTransport>(from_child[0], to_child[1], pid);
}

} // namespace saci::bridge
