#include "shortcheck/service/jobs.hpp"

#include <algorithm>

namespace shortcheck::service {

std::string_view to_string(JobState state) {
    switch (state) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
    }
    return "failed";
}

JobQueue::JobQueue(int workers) {
    const int n = std::max(1, workers);
    threads_.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) threads_.emplace_back([this] { worker(); });
}

JobQueue::~JobQueue() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    work_cv_.notify_all();
    for (auto& t : threads_) t.join();
}

JobQueue::Submitted JobQueue::submit(const std::string& video_id, std::function<void()> task) {
    std::lock_guard lock(mutex_);
    if (auto it = in_flight_.find(video_id); it != in_flight_.end()) return {it->second, true};
    const std::string id = "job-" + std::to_string(next_id_++);
    jobs_[id] = JobInfo{id, video_id, JobState::queued, std::nullopt};
    in_flight_[video_id] = id;
    queue_.emplace_back(id, std::move(task));
    work_cv_.notify_one();
    return {id, false};
}

std::optional<JobInfo> JobQueue::get(const std::string& job_id) const {
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end()) return std::nullopt;
    return it->second;
}

void JobQueue::wait_idle() {
    std::unique_lock lock(mutex_);
    idle_cv_.wait(lock, [this] { return queue_.empty() && busy_ == 0; });
}

void JobQueue::worker() {
    for (;;) {
        std::pair<std::string, std::function<void()>> item;
        {
            std::unique_lock lock(mutex_);
            work_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
            if (queue_.empty()) return;
            item = std::move(queue_.front());
            queue_.pop_front();
            jobs_[item.first].state = JobState::running;
            ++busy_;
        }
        std::optional<std::string> error;
        try {
            item.second();
        } catch (const std::exception& e) {
            error = e.what();
        } catch (...) {
            error = "unknown error";
        }
        {
            std::lock_guard lock(mutex_);
            auto& job = jobs_[item.first];
            job.state = error ? JobState::failed : JobState::done;
            job.error = error;
            in_flight_.erase(job.video_id);
            --busy_;
        }
        idle_cv_.notify_all();
    }
}

} // namespace shortcheck::service
