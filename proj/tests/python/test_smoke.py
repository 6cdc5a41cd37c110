import pytest

paufsim = pytest.importorskip("paufsim")


def test_constants():
    assert paufsim.LINKER_SIZE == 264
    assert paufsim.RESIDENT_CAPACITY == 664
    assert paufsim.CLUSTER_SIZE == 4096


def test_convert_roundtrip():
    vol = paufsim.Volume()
    pid = vol.register_process("user")
    vol.create_file(pid, "docs/note.txt", b"hello ads world")
    path, ads = paufsim.convert(vol, pid, "docs/note.txt")
    assert path == "docs/note.txt.ps1"
    assert vol.peek_stream(path, ads) == b"hello ads world"
    linker = vol.peek_stream(path, "")
    assert len(linker) == paufsim.LINKER_SIZE
    assert paufsim.is_canonical_linker(linker)
    paufsim.revert(vol, pid, path)
    assert vol.peek_stream("docs/note.txt", "") == b"hello ads world"


def test_scenario_no_loss():
    ids = paufsim.builtin_scenarios()
    assert len(ids) == 21
    report = paufsim.run_scenario("wannacry-advanced", corpus_count=25)
    assert report["verdict"]["files_lost"] == 0
    assert report["verdict"]["recovered_intact"] == report["verdict"]["pauf_total"]
    assert report["trace"]["terminated"] is True


def test_restore_after_attack():
    report = paufsim.run_scenario("gandcrab-off", corpus_count=20)
    assert report["trace"]["linkers_encrypted"] > 0
    assert report["verdict"]["files_lost"] == 0


def test_image_roundtrip(tmp_path):
    vol = paufsim.Volume()
    pid = vol.register_process("user")
    vol.create_file(pid, "a.txt", b"x" * 5000)
    path = str(tmp_path / "vol.pvol")
    paufsim.save_image(vol, path)
    back = paufsim.load_image(path)
    assert back.state_digest() == vol.state_digest()


def test_errors_are_typed():
    vol = paufsim.Volume()
    pid = vol.register_process("user")
    vol.create_file(pid, "a.txt", b"x")
    with pytest.raises(paufsim.PaufsimError):
        vol.create_file(pid, "a.txt", b"y")
