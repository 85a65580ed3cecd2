#ifndef CHIRPLET_CHIRPLET_HPP
#define CHIRPLET_CHIRPLET_HPP

// Umbrella header for the whole library.

#include "chirplet/bench.hpp"
#include "chirplet/cli.hpp"
#include "chirplet/decomposition.hpp"
#include "chirplet/dictionary.hpp"
#include "chirplet/errors.hpp"
#include "chirplet/estimator.hpp"
#include "chirplet/fft.hpp"
#include "chirplet/gaussian_chirplet.hpp"
#include "chirplet/io.hpp"
#include "chirplet/png.hpp"
#include "chirplet/rng.hpp"
#include "chirplet/signal.hpp"
#include "chirplet/spectra.hpp"
#include "chirplet/stats.hpp"

#endif  // CHIRPLET_CHIRPLET_HPP
