"""ZenoTransfer - перенос электрона между двумя квантовыми точками через континуум конечной ширины."""
