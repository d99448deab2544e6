#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace fbsde {

template <typename Body>
void parallel_chunks(std::size_t count, std::size_t workers, Body&& body) {
    if (workers == 0) workers = default_workers();
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers <= 1) {
        if (count > 0) body(std::size_t{0}, count);
        return;
    }
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t first = w * chunk;
        const std::size_t last = std::min(count, first + chunk);
        if (first >= last) break;
        threads.emplace_back([&, w, first, last] {
            try {
                body(first, last);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace fbsde
