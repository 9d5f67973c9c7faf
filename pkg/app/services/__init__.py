"""
Serviços numéricos.

tensorcore -> carleman -> decompose -> circuit -> simverify -> blockenc;
vqprobe usa a representação de circuitos e o simulador em lote próprio.
"""
