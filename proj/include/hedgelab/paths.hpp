#pragma once

#include <cstddef>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "hedgelab/market.hpp"
#include "hedgelab/rng.hpp"

namespace hedgelab {

// A bundle of named trajectories on a shared time grid. Channel data is a
// flat n_paths x (n_steps+1) array, path-major.
class PathSet {
  public:
    PathSet() = default;
    PathSet(TimeGrid grid, std::size_t n_paths, SeedSpec seed, std::uint64_t path_begin = 0)
        : grid_(grid), n_paths_(n_paths), seed_(seed), path_begin_(path_begin) {}

    const TimeGrid& grid() const { return grid_; }
    std::size_t n_paths() const { return n_paths_; }
    std::size_t n_nodes() const { return static_cast<std::size_t>(grid_.n_nodes()); }
    SeedSpec seed() const { return seed_; }
    // Global index of the first path; lets block-wise simulation reproduce the
    // exact streams of a monolithic run.
    std::uint64_t path_begin() const { return path_begin_; }

    std::vector<double>& add_channel(const std::string& name) {
        if (has_channel(name)) throw std::invalid_argument("PathSet: duplicate channel " + name);
        names_.push_back(name);
        data_.emplace_back(n_paths_ * n_nodes(), 0.0);
        return data_.back();
    }

    bool has_channel(const std::string& name) const {
        for (const auto& n : names_)
            if (n == name) return true;
        return false;
    }

    const std::vector<double>& channel(const std::string& name) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return data_[i];
        throw std::invalid_argument("PathSet: missing channel " + name);
    }
    std::vector<double>& channel(const std::string& name) {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return data_[i];
        throw std::invalid_argument("PathSet: missing channel " + name);
    }

    const std::vector<std::string>& channel_names() const { return names_; }

    double at(const std::vector<double>& chan, std::size_t path, std::size_t step) const {
        return chan[path * n_nodes() + step];
    }
    std::size_t idx(std::size_t path, std::size_t step) const {
        return path * n_nodes() + step;
    }

  private:
    TimeGrid grid_;
    std::size_t n_paths_ = 0;
    SeedSpec seed_;
    std::uint64_t path_begin_ = 0;
    std::vector<std::string> names_;
    // deque: growing the channel list must not invalidate references
    // handed out by add_channel
    std::deque<std::vector<double>> data_;
};

}  // namespace hedgelab
