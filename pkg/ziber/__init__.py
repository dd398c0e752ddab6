"""Zero-inflated Bernoulli (ZIBer) regression: links, MLE, simulation and Vuong selection."""
