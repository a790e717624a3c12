from dicerun.cli import main

main()
