"""
Reading an order-event log
==========================

Decode a small exchange log, pull out per-stock order-state sequences and
the daily price extremes that feed the volatility classifier.
"""

import io

from orderflow.ingest import daily_price_stats, decode_stream, extract_sequences

log = """DATE,TIMESTAMP,ORDER ID.,EVENT TYPE,TICKER,PRICE,QUANTITY,EXCHANGE
2018-11-06,4:00:00.002,12011,ADD-BID,AAPL,164.99,100,NASDAQ
2018-11-06,4:00:00.032,12056,ADD-ASK,AAPL,194.99,500,NASDAQ
2018-11-06,4:00:00.112,13473,ADD-BID,XLF,67.50,300,NASDAQ
2018-11-06,9:30:00.156,89017,DELETE-BID,GOOGL,0,100,NASDAQ
2018-11-06,9:30:01.006,83907,ADD-BID,INTC,123.70,200,NASDAQ
2018-11-06,9:30:01.210,12011,DELETE-BID,AAPL,0,100,NASDAQ
"""

# decode_stream is a generator, so a multi-gigabyte file is never held in memory
events = list(decode_stream(io.StringIO(log)))
for e in events[:2]:
    print(e)

# one state sequence per (ticker, day), in file order
seqs = extract_sequences(events, {"AAPL", "INTC"})
for (ticker, day), seq in seqs.items():
    print(ticker, day, seq.states)

# zero-price rows (deletes, cancels) do not count toward the range
stats = daily_price_stats(events, {"AAPL"})
print(stats)

# malformed rows can be collected instead of aborting the read
bad = log + "2018-11-06,9:31:00.000,1,ADD-BIDS,AAPL,1,1,NASDAQ\n"
errors = []
n = sum(1 for _ in decode_stream(io.StringIO(bad), on_error=errors.append))
print(n, "good rows;", errors)
