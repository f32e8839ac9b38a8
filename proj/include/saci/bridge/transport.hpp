#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace saci::bridge {

using Millis = std::chrono::milliseconds;

inline constexpr Millis kDefaultTimeout{30000};
inline constexpr std::size_t kMaxLineBytes = std::size_t{1} << 24;

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TimeoutError : public TransportError {
public:
    using TransportError::TransportError;
};

/// Line-oriented, lock-step channel. Lines never contain '\n'.
class Transport {
public:
    virtual ~Transport() = default;
    virtual void send_line(const std::string& line) = 0;
    /// Next line, or nullopt once the peer has closed. Throws TimeoutError when nothing
    /// arrives before `timeout`; a negative timeout waits forever.
    virtual std::optional<std::string> recv_line(Millis timeout) = 0;
    virtual void close() = 0;
};

/// Reads from `in_fd` and writes to `out_fd`. Owned descriptors are closed on destruction.
class FdTransport : public Transport {
public:
    FdTransport(int in_fd, int out_fd, bool owns);
    ~FdTransport() override;
    FdTransport(const FdTransport&) = delete;
    FdTransport& operator=(const FdTransport&) = delete;

    void send_line(const std::string& line) override;
    std::optional<std::string> recv_line(Millis timeout) override;
    void close() override;

private:
    int in_fd_;
    int out_fd_;
    bool owns_;
    bool eof_ = false;
    std::string buffer_;
};

/// Connected pair of in-memory endpoints, safe to use from two threads.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_loopback_pair();

std::unique_ptr<Transport> tcp_connect(const std::string& host, std::uint16_t port,
                                       Millis timeout = kDefaultTimeout);

class TcpListener {
public:
    /// Port 0 picks a free port; see port().
    explicit TcpListener(std::uint16_t port, const std::string& host = "127.0.0.1");
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::uint16_t port() const { return port_; }
    /// Blocks for the next client; a negative timeout waits forever.
    std::unique_ptr<Transport> accept(Millis timeout = Millis{-1});

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Starts `argv` with its standard streams connected to the returned transport. The child is
/// reaped when the transport is destroyed.
std::unique_ptr<Transport> spawn_process(const std::vector<std::string>& argv);

} // namespace saci::bridge
