#include "rssa/ws_server.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <fstream>
#include <iostream>
#include <utility>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace rssa {

namespace beast = boost::beast;
namespace websocket = boost::beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

std::filesystem::path persist_live_record(const LiveRecord& record,
                                          const std::filesystem::path& dir, int index) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path stem =
        dir / (record.record.trial + "_" + std::string(to_string(record.record.method)) + "_" +
               std::to_string(index));
    std::ofstream(stem.string() + ".replay.json") << scenario_to_json(record.replay) << '\n';
    std::ofstream(stem.string() + ".log.csv") << trial_log_csv(record.record);
    std::ofstream(stem.string() + ".summary.json") << summary_json(record.record) << '\n';
    return stem;
}

namespace {

struct Shared {
    Scenario scenario;
    ServeOptions options;
    std::atomic<int> record_counter{0};
};

class Session : public std::enable_shared_from_this<Session> {
public:
    Session(tcp::socket socket, std::shared_ptr<Shared> shared)
        : ws_(std::move(socket)),
          timer_(ws_.get_executor()),
          shared_(std::move(shared)),
          live_(shared_->scenario) {}

    void run() {
        ws_.async_accept(beast::bind_front_handler(&Session::on_accept, shared_from_this()));
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec) {
            return;
        }
        ws_.text(true);
        do_read();
        const double period = shared_->options.tick_interval_s.value_or(shared_->scenario.dt);
        interval_ = std::chrono::duration_cast<net::steady_timer::duration>(
            std::chrono::duration<double>(period));
        next_tick_ = net::steady_timer::clock_type::now();
        schedule_tick();
    }

    void do_read() {
        ws_.async_read(buffer_, beast::bind_front_handler(&Session::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) {
            close();
            return;
        }
        const std::string text = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
        for (auto& reply : live_.handle_message(text)) {
            send(std::move(reply), false);
        }
        persist();
        do_read();
    }

    void schedule_tick() {
        next_tick_ += interval_;
        timer_.expires_at(next_tick_);
        timer_.async_wait(beast::bind_front_handler(&Session::on_tick, shared_from_this()));
    }

    void on_tick(beast::error_code ec) {
        if (ec || closed_) {
            return;
        }
        const auto messages = live_.tick();
        for (std::size_t i = 0; i < messages.size(); ++i) {
            send(messages[i], i == 0);
        }
        persist();
        schedule_tick();
    }

    // Frames are latest-wins: a queued frame that has not started writing is
    // replaced by a newer one. Summaries and warnings are never dropped.
    void send(std::string message, bool is_frame) {
        if (closed_) {
            return;
        }
        const std::size_t in_flight = writing_ ? 1 : 0;
        if (is_frame && outbox_.size() > in_flight && outbox_.back().second) {
            outbox_.back().first = std::move(message);
        } else {
            outbox_.emplace_back(std::move(message), is_frame);
        }
        if (!writing_) {
            do_write();
        }
    }

    void do_write() {
        writing_ = true;
        ws_.async_write(net::buffer(outbox_.front().first),
                        beast::bind_front_handler(&Session::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        writing_ = false;
        outbox_.pop_front();
        if (ec) {
            close();
            return;
        }
        if (!outbox_.empty()) {
            do_write();
        }
    }

    void close() {
        if (closed_) {
            return;
        }
        closed_ = true;
        timer_.cancel();
        live_.end();
        persist();
    }

    void persist() {
        for (const auto& rec : live_.take_records()) {
            if (shared_->options.record_dir) {
                try {
                    persist_live_record(rec, *shared_->options.record_dir, shared_->record_counter++);
                } catch (const std::exception& ex) {
                    std::cerr << "serve: failed to persist record: " << ex.what() << '\n';
                }
            }
        }
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    net::steady_timer timer_;
    net::steady_timer::duration interval_{};
    net::steady_timer::time_point next_tick_{};
    std::shared_ptr<Shared> shared_;
    LiveSession live_;
    std::deque<std::pair<std::string, bool>> outbox_;
    bool writing_{false};
    bool closed_{false};
};

}  // namespace

struct WsServer::Impl {
    net::io_context ioc{1};
    tcp::acceptor acceptor{ioc};
    std::shared_ptr<Shared> shared;

    void do_accept() {
        acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
            if (ec) {
                return;
            }
            std::make_shared<Session>(std::move(socket), shared)->run();
            do_accept();
        });
    }
};

WsServer::WsServer(Scenario scenario_template, ServeOptions options) : impl_(std::make_unique<Impl>()) {
    impl_->shared = std::make_shared<Shared>();
    impl_->shared->scenario = std::move(scenario_template);
    impl_->shared->options = std::move(options);
    // Fail fast on a bad template rather than on the first connection.
    LiveSession probe(impl_->shared->scenario);

    const auto address = net::ip::make_address(impl_->shared->options.address);
    const tcp::endpoint endpoint{address, impl_->shared->options.port};
    impl_->acceptor.open(endpoint.protocol());
    impl_->acceptor.set_option(net::socket_base::reuse_address(true));
    impl_->acceptor.bind(endpoint);
    impl_->acceptor.listen(net::socket_base::max_listen_connections);
}

WsServer::~WsServer() = default;

unsigned short WsServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void WsServer::run() {
    impl_->do_accept();
    impl_->ioc.run();
}

void WsServer::stop() {
    net::post(impl_->ioc, [impl = impl_.get()] {
        beast::error_code ec;
        impl->acceptor.close(ec);
        impl->ioc.stop();
    });
}

}  // namespace rssa
