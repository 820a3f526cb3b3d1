"""Тесты ZenoTransfer."""
