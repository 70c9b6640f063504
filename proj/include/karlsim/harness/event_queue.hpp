#pragma once

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

/* Deterministic discrete-event ordering. Events pop strictly by
 * (time, source, seq); ties across sources resolve by source name, ties
 * within a source by sequence number, so the processing order never
 * depends on push order. */

namespace karlsim::harness {

template <typename Payload>
struct Event {
    double time_s = 0;
    std::string source;
    std::int64_t seq = 0;
    Payload payload{};
};

template <typename Payload>
class EventQueue {
public:
    void push(Event<Payload> e) { q_.push(std::move(e)); }

    bool empty() const { return q_.empty(); }
    std::size_t size() const { return q_.size(); }

    Event<Payload> pop() {
        if (q_.empty()) throw std::runtime_error("EventQueue: pop on empty queue");
        Event<Payload> e = q_.top();
        q_.pop();
        return e;
    }

private:
    struct After {
        bool operator()(const Event<Payload>& a, const Event<Payload>& b) const {
            return std::tie(a.time_s, a.source, a.seq) > std::tie(b.time_s, b.source, b.seq);
        }
    };

    std::priority_queue<Event<Payload>, std::vector<Event<Payload>>, After> q_;
};

}  // namespace karlsim::harness
