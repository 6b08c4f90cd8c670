// SPDX-License-Identifier: Apache-2.0
#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "mrse/transport.hpp"

namespace mrse {

using namespace wire;

namespace {

[[noreturn]] void fail_errno(const std::string& what) {
  throw TransportError(what + ": " + std::strerror(errno));
}

void write_all(int fd, const Bytes& data) {
  size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail_errno("send");
    }
    off += static_cast<size_t>(n);
  }
}

void read_exact(int fd, uint8_t* buf, size_t len) {
  size_t off = 0;
  while (off < len) {
    ssize_t n = ::recv(fd, buf + off, len - off, 0);
    if (n == 0) throw TransportError("peer closed the connection");
    if (n < 0) {
      if (errno == EINTR) continue;
      fail_errno("recv");
    }
    off += static_cast<size_t>(n);
  }
}

Bytes read_frame(int fd) {
  Bytes frame(kHeaderSize);
  read_exact(fd, frame.data(), kHeaderSize);
  for (size_t i = 0; i < kMagic.size(); ++i) {
    if (frame[i] != kMagic[i]) throw WireError("bad magic on stream");
  }
  size_t plen = Codec::payload_length(frame);
  frame.resize(kHeaderSize + plen);
  if (plen > 0) read_exact(fd, frame.data() + kHeaderSize, plen);
  return frame;
}

int dial(const std::string& addr) {
  auto [host, port] = parse_addr(addr);
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) fail_errno("socket");
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1) {
    ::close(fd);
    throw TransportError("bad address: " + host);
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) < 0) {
    int e = errno;
    ::close(fd);
    errno = e;
    fail_errno("connect to " + addr);
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return fd;
}

void send_hello(int fd, Role self, const Codec& codec) {
  ControlMsg hello;
  hello.cmd = ControlCmd::hello;
  hello.role_or_op = static_cast<uint8_t>(self);
  write_all(fd, codec.encode({0, hello}));
}

}  // namespace

std::pair<std::string, uint16_t> parse_addr(const std::string& addr) {
  size_t colon = addr.rfind(':');
  if (colon == std::string::npos || colon + 1 >= addr.size()) {
    throw TransportError("address must be host:port, got: " + addr);
  }
  std::string host = addr.substr(0, colon);
  unsigned long port;
  try {
    port = std::stoul(addr.substr(colon + 1));
  } catch (const std::exception&) {
    throw TransportError("bad port in: " + addr);
  }
  if (port > 65535) throw TransportError("port out of range in: " + addr);
  // Port 0 is allowed for listeners: bind picks a free port.
  return {host, static_cast<uint16_t>(port)};
}

TcpServer::TcpServer(ServerNode node, const std::string& listen_host,
                     uint16_t listen_port, std::optional<std::string> peer)
    : node_(std::move(node)), peer_addr_(std::move(peer)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) fail_errno("socket");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(listen_port);
  if (::inet_pton(AF_INET, listen_host.c_str(), &sa.sin_addr) != 1) {
    throw TransportError("bad listen address: " + listen_host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) < 0) {
    fail_errno("bind " + listen_host + ":" + std::to_string(listen_port) +
               " as " + role_name(node_.role()));
  }
  if (::listen(listen_fd_, 8) < 0) fail_errno("listen");
  sockaddr_in bound{};
  socklen_t blen = sizeof(bound);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &blen);
  port_ = ntohs(bound.sin_port);
}

TcpServer::~TcpServer() {
  for (int fd : {listen_fd_, do_fd_, peer_fd_}) {
    if (fd >= 0) ::close(fd);
  }
}

void TcpServer::route(std::vector<Outbound> outs) {
  for (auto& o : outs) {
    int fd = -1;
    if (o.dest == Role::data_owner) {
      fd = do_fd_;
    } else if (o.dest == node_.role()) {
      throw ProtocolError("node routed a frame to itself");
    } else {
      fd = peer_fd_;
    }
    if (fd < 0) {
      throw TransportError(std::string("no connection to ") +
                           role_name(o.dest));
    }
    meter_.record(node_.role(), o.dest, o.frame);
    write_all(fd, o.frame);
  }
}

void TcpServer::run() {
  if (node_.role() == Role::server0 && peer_addr_) {
    peer_fd_ = dial(*peer_addr_);
    send_hello(peer_fd_, Role::server0, node_.codec());
  }

  std::vector<int> unclassified;
  bool running = true;

  while (running) {
    std::vector<pollfd> fds;
    fds.push_back({listen_fd_, POLLIN, 0});
    if (do_fd_ >= 0) fds.push_back({do_fd_, POLLIN, 0});
    if (peer_fd_ >= 0) fds.push_back({peer_fd_, POLLIN, 0});
    for (int fd : unclassified) fds.push_back({fd, POLLIN, 0});

    if (::poll(fds.data(), fds.size(), -1) < 0) {
      if (errno == EINTR) continue;
      fail_errno("poll");
    }

    for (auto& pfd : fds) {
      if (!(pfd.revents & (POLLIN | POLLHUP | POLLERR))) continue;

      if (pfd.fd == listen_fd_) {
        int conn = ::accept(listen_fd_, nullptr, nullptr);
        if (conn < 0) fail_errno("accept");
        int one = 1;
        ::setsockopt(conn, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        unclassified.push_back(conn);
        continue;
      }

      Bytes frame;
      try {
        frame = read_frame(pfd.fd);
      } catch (const TransportError&) {
        // Connection dropped; forget it.
        ::close(pfd.fd);
        if (pfd.fd == do_fd_) do_fd_ = -1;
        if (pfd.fd == peer_fd_) peer_fd_ = -1;
        std::erase(unclassified, pfd.fd);
        continue;
      }

      // First frame on a fresh connection must be a hello.
      if (std::find(unclassified.begin(), unclassified.end(), pfd.fd) !=
          unclassified.end()) {
        ProtocolMessage msg = node_.codec().decode(frame);
        auto* ctl = std::get_if<ControlMsg>(&msg.body);
        if (ctl == nullptr || ctl->cmd != ControlCmd::hello) {
          ::close(pfd.fd);
          std::erase(unclassified, pfd.fd);
          continue;
        }
        Role who = static_cast<Role>(ctl->role_or_op);
        if (who == Role::data_owner) {
          do_fd_ = pfd.fd;
        } else {
          peer_fd_ = pfd.fd;
        }
        std::erase(unclassified, pfd.fd);
        continue;
      }

      Role from = pfd.fd == do_fd_
                      ? Role::data_owner
                      : (node_.role() == Role::server0 ? Role::server1
                                                       : Role::server0);

      try {
        if (frame_type(frame) == MsgType::control) {
          ProtocolMessage msg = node_.codec().decode(frame);
          auto& ctl = std::get<ControlMsg>(msg.body);
          if (ctl.cmd == ControlCmd::shutdown) {
            running = false;
            break;
          }
          if (ctl.cmd == ControlCmd::meter_query) {
            MeterSnapshot snap = meter_.snapshot();
            ControlMsg rep;
            rep.cmd = ControlCmd::meter_report;
            rep.meter = {snap.s0_to_s1_bits, snap.s1_to_s0_bits,
                         snap.server_to_do_bits, snap.do_to_server_bits};
            write_all(pfd.fd, node_.codec().encode({msg.session_id, rep}));
            continue;
          }
        }
        route(node_.handle(from, frame));
      } catch (const Error& e) {
        ControlMsg err;
        err.cmd = ControlCmd::error_report;
        err.text = e.what();
        try {
          write_all(pfd.fd, node_.codec().encode({0, err}));
        } catch (const TransportError&) {
        }
      }
    }
  }
}

TcpTransport::TcpTransport(const Mpz& modulus, const std::string& s0_addr,
                           const std::string& s1_addr)
    : codec_(modulus) {
  try {
    s0_fd_ = dial(s0_addr);
  } catch (const TransportError& e) {
    throw TransportError(std::string("server0: ") + e.what());
  }
  send_hello(s0_fd_, Role::data_owner, codec_);
  try {
    s1_fd_ = dial(s1_addr);
  } catch (const TransportError& e) {
    throw TransportError(std::string("server1: ") + e.what());
  }
  send_hello(s1_fd_, Role::data_owner, codec_);
}

TcpTransport::~TcpTransport() {
  for (int fd : {s0_fd_, s1_fd_}) {
    if (fd >= 0) ::close(fd);
  }
}

int TcpTransport::fd_for(Role dest) const {
  if (dest == Role::server0) return s0_fd_;
  if (dest == Role::server1) return s1_fd_;
  throw TransportError("driver can only address the servers");
}

void TcpTransport::send(Role dest, const Bytes& frame) {
  own_.record(Role::data_owner, dest, frame);
  write_all(fd_for(dest), frame);
}

std::pair<Role, Bytes> TcpTransport::recv() {
  if (!pending_.empty()) {
    auto front = std::move(pending_.front());
    pending_.pop_front();
    return front;
  }
  pollfd fds[2] = {{s0_fd_, POLLIN, 0}, {s1_fd_, POLLIN, 0}};
  while (true) {
    if (::poll(fds, 2, 30000) <= 0) {
      throw TransportError("timed out waiting for a server frame");
    }
    for (auto& pfd : fds) {
      if (pfd.revents & (POLLIN | POLLHUP | POLLERR)) {
        Role from = pfd.fd == s0_fd_ ? Role::server0 : Role::server1;
        return {from, read_frame(pfd.fd)};
      }
    }
  }
}

MeterSnapshot TcpTransport::query_server(Role server) {
  ControlMsg q;
  q.cmd = ControlCmd::meter_query;
  write_all(fd_for(server), codec_.encode({0, q}));
  while (true) {
    Bytes frame = read_frame(fd_for(server));
    ProtocolMessage msg = codec_.decode(frame);
    if (auto* ctl = std::get_if<ControlMsg>(&msg.body);
        ctl && ctl->cmd == ControlCmd::meter_report) {
      return MeterSnapshot{ctl->meter[0], ctl->meter[1], ctl->meter[2],
                           ctl->meter[3]};
    }
    pending_.emplace_back(server, std::move(frame));
  }
}

MeterSnapshot TcpTransport::meter() {
  MeterSnapshot total = own_.snapshot();  // do_to_server from this side
  MeterSnapshot s0 = query_server(Role::server0);
  MeterSnapshot s1 = query_server(Role::server1);
  total.s0_to_s1_bits = s0.s0_to_s1_bits;
  total.s1_to_s0_bits = s1.s1_to_s0_bits;
  total.server_to_do_bits = s0.server_to_do_bits + s1.server_to_do_bits;
  return total;
}

}  // namespace mrse
