#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "power.hpp"

/* Holding-register facade over the rooftop power stage, mirroring how the
 * rooftop distribution unit is scripted over Modbus TCP.
 *
 * Register n (0-based) switches the n-th rooftop channel in tree
 * declaration order; register 100 switches the cabin feeder. Values read
 * and write as 0 (off) / 1 (on); any nonzero write counts as on. Reads
 * report the channel's own switch state, so a rooftop register can read 1
 * while the feeder is off and the channel delivers nothing. */

namespace karlsim::power {

class RooftopRegisterMap {
public:
    static constexpr std::uint16_t kFeederRegister = 100;

    explicit RooftopRegisterMap(PowerTree tree) : tree_(std::move(tree)) {
        for (const auto& c : tree_.channels)
            if (c.stage == Stage::Rooftop) rooftop_ids_.push_back(c.id);
    }

    const PowerTree& tree() const { return tree_; }

    std::size_t rooftop_channel_count() const { return rooftop_ids_.size(); }

    std::uint16_t read_holding(std::uint16_t address) const {
        const PowerChannel* c = tree_.find(channel_for(address));
        return c->on ? 1 : 0;
    }

    void write_holding(std::uint16_t address, std::uint16_t value) {
        tree_ = switch_channel(tree_, channel_for(address), value != 0);
    }

private:
    std::string channel_for(std::uint16_t address) const {
        if (address == kFeederRegister) {
            if (!tree_.find(tree_.rooftop_feeder_id))
                throw std::out_of_range("illegal data address: no feeder channel");
            return tree_.rooftop_feeder_id;
        }
        if (address < rooftop_ids_.size()) return rooftop_ids_[address];
        throw std::out_of_range("illegal data address: " + std::to_string(address));
    }

    PowerTree tree_;
    std::vector<std::string> rooftop_ids_;
};

}  // namespace karlsim::power
